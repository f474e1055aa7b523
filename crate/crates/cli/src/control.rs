//! frame encode|decode and registers apply.

use std::path::PathBuf;

use clap::{Args, Subcommand};

use ambisim::control::{
    frame_decode, frame_dump, interpret, Command, HardwareModel, InteractionFrame, RegisterBank, TypeTable,
};
use ambisim::netsim::ConfigFile;
use ambisim::phy::bits::{bits_to_hex, hex_to_bits};

use crate::failure::{CliResult, Failure};
use crate::output::Run;
use crate::setup::split_kv;
use crate::PhyArgs;

#[derive(Subcommand, Debug)]
pub enum FrameCommand {
    /// Build one interaction frame and print it as hex.
    Encode(EncodeArgs),
    /// Locate frames in a bit stream.
    Decode(DecodeArgs),
}

#[derive(Args, Debug)]
pub struct EncodeArgs {
    #[arg(long)]
    id: u8,
    #[arg(long = "type")]
    type_field: u8,
    /// Unsigned value for the data field.
    #[arg(long)]
    value: Option<u64>,
    /// Data width in bits; defaults to the type's table length.
    #[arg(long)]
    width: Option<usize>,
    /// Data field as hex, truncated to --width bits.
    #[arg(long)]
    data: Option<String>,
}

#[derive(Args, Debug)]
pub struct DecodeArgs {
    /// Stream as hex.
    #[arg(long)]
    hex: Option<String>,
    /// File holding the stream as hex or as 0/1 characters.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Use only the first N bits of a hex stream.
    #[arg(long)]
    bits: Option<usize>,
    /// Extra `type=length` table entries; repeatable.
    #[arg(long = "type-len", value_name = "TYPE=BITS")]
    type_len: Vec<String>,
}

fn int_arg(s: &str) -> CliResult<u64> {
    let s = s.trim();
    let r = match s.strip_prefix("0x") {
        Some(h) => u64::from_str_radix(h, 16),
        None => s.parse(),
    };
    r.map_err(|e| Failure::Usage(format!("{s:?}: {e}")))
}

fn encode(run: &mut Run, a: &EncodeArgs) -> CliResult<()> {
    let table = TypeTable::default();
    let frame = match (&a.data, a.value) {
        (Some(_), Some(_)) => return Err(Failure::Usage("give --data or --value, not both".into())),
        (Some(h), None) => {
            let n = a.width.unwrap_or(h.trim().trim_start_matches("0x").len() * 4);
            InteractionFrame::new(a.id, a.type_field, hex_to_bits(h, n)?)?
        }
        (None, Some(v)) => {
            let w = a.width.or_else(|| table.len_of(a.type_field)).unwrap_or(64);
            if w < 64 && v >> w != 0 {
                return Err(Failure::Config(format!("value {v} does not fit in {w} bits")));
            }
            InteractionFrame::with_value(a.id, a.type_field, v, w)?
        }
        (None, None) => InteractionFrame::new(a.id, a.type_field, Vec::new())?,
    };
    let hex = format!("0x{}", frame.to_hex().to_uppercase());
    run.param("id", a.id);
    run.param("type", a.type_field);
    run.param("data_bits", frame.data().len());
    run.param("data_hex", bits_to_hex(frame.data()).to_uppercase());
    run.write("frame.hex", format!("{hex}\n"))?;
    println!("{hex}");
    Ok(())
}

fn read_stream(a: &DecodeArgs) -> CliResult<Vec<u8>> {
    let text = match (&a.hex, &a.input) {
        (Some(h), None) => h.clone(),
        (None, Some(p)) => std::fs::read_to_string(p).map_err(|e| Failure::Config(format!("{}: {e}", p.display())))?,
        _ => return Err(Failure::Usage("give exactly one of --hex or --input".into())),
    };
    let compact: String = text.split_whitespace().collect();
    let body = compact.trim_start_matches("0x");
    if !body.is_empty() && body.chars().all(|c| c == '0' || c == '1') && a.hex.is_none() {
        return Ok(body.bytes().map(|b| b - b'0').collect());
    }
    let n = a.bits.unwrap_or(body.len() * 4);
    Ok(hex_to_bits(body, n)?)
}

fn decode(run: &mut Run, a: &DecodeArgs) -> CliResult<()> {
    let mut table = TypeTable::default();
    for t in &a.type_len {
        let (k, v) = split_kv(t)?;
        table = table.with(int_arg(k)? as u8, int_arg(v)? as usize)?;
    }
    let stream = read_stream(a)?;
    let rep = frame_decode(&stream, &table)?;
    run.param("stream_bits", stream.len());
    run.param("type_table", table.iter().map(|(k, v)| format!("{k:#04x}={v}")).collect::<Vec<_>>());
    run.write_csv(
        "frames.csv",
        &["offset", "id", "type", "data_bits", "data_hex", "value"],
        rep.frames.iter().map(|f| {
            vec![
                f.offset.to_string(),
                f.frame.id.to_string(),
                f.frame.type_field.to_string(),
                f.frame.data().len().to_string(),
                bits_to_hex(f.frame.data()).to_uppercase(),
                f.frame.value().to_string(),
            ]
        }),
    )?;
    let frames: Vec<InteractionFrame> = rep.frames.iter().map(|f| f.frame.clone()).collect();
    for (f, line) in rep.frames.iter().zip(frame_dump(&frames).lines()) {
        println!("@{:<5} {line}", f.offset);
    }
    for r in &rep.rejected {
        println!("rejected @{}: {}", r.offset, r.reason);
    }
    println!("{} frame(s), {} gap(s)", rep.frames.len(), rep.gaps.len());
    Ok(())
}

pub fn frame(run: &mut Run, c: &FrameCommand) -> CliResult<()> {
    match c {
        FrameCommand::Encode(a) => encode(run, a),
        FrameCommand::Decode(a) => decode(run, a),
    }
}

#[derive(Subcommand, Debug)]
pub enum RegistersCommand {
    /// Apply `key=value` writes over the `[device]` section and interpret the bank.
    Apply(ApplyArgs),
}

#[derive(Args, Debug)]
pub struct ApplyArgs {
    #[command(flatten)]
    phy: PhyArgs,
}

fn describe(bank: &RegisterBank) -> String {
    let p = &bank.phy;
    let mut s = String::new();
    for (k, v) in [
        ("mode", bank.mode.to_string()),
        ("device_id", bank.device_id.to_string()),
        ("freq", bank.freq.map_or("unset".into(), |f| format!("{f}"))),
        ("power_dbm", format!("{}", bank.power_dbm)),
        ("payload_id", bank.payload_id.clone()),
        ("channel", bank.channel.map_or("unset".into(), |c| c.to_string())),
        ("sensor_enable", bank.sensor_enable.to_string()),
        ("protocol", p.protocol.to_string()),
        ("modulation", p.modulation.to_string()),
        ("data_rate", format!("{}", p.data_rate)),
        ("samples_per_symbol", p.samples_per_symbol.to_string()),
        ("subcarrier", p.subcarrier_hz.map_or("none".into(), |f| format!("{f}"))),
        ("line_coding", p.line_coding.to_string()),
        ("v_activate", format!("{}", bank.energy.v_activate)),
        ("v_cutoff", format!("{}", bank.energy.v_cutoff)),
    ] {
        s.push_str(&format!("{k} = {v}\n"));
    }
    s
}

pub fn registers(run: &mut Run, cfg: &ConfigFile, c: &RegistersCommand) -> CliResult<()> {
    let RegistersCommand::Apply(a) = c;
    let bank = a.phy.bank(cfg)?;
    a.phy.record(run);
    let cmds = interpret(&bank)?;
    let mut out = String::new();
    for cmd in &cmds {
        match cmd {
            Command::PhyFrame(f) | Command::PayloadFrame(f) => out.push_str(&frame_dump(std::slice::from_ref(f))),
            other => out.push_str(&format!("{other:?}\n")),
        }
    }
    let mut hw = HardwareModel::new(bank.device_id);
    for d in hw.apply(&cmds) {
        out.push_str(&format!("# {d}\n"));
    }
    let regs = describe(&bank);
    run.write("registers.txt", &regs)?;
    run.write("commands.txt", &out)?;
    print!("{regs}{out}");
    Ok(())
}
