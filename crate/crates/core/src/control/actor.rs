//! Single-owner control actor: the bank, radio state and hardware model live
//! on one thread and are reached through a command queue.

use std::sync::mpsc::{channel, Sender};
use std::thread::JoinHandle;
use std::time::Duration;

use super::interpreter::{interpret, Command, HardwareModel};
use super::radio::{LatencyComponent, LatencyTable, RadioState};
use super::registers::{DeviceMode, RegisterBank};
use crate::error::{Error, Result};

type Reply<T> = Sender<Result<T>>;

enum Msg {
    Set(String, String, Reply<RegisterBank>),
    Commit(Reply<(Vec<Command>, Vec<String>)>),
    Transition(DeviceMode, Reply<Vec<(LatencyComponent, Duration)>>),
    Advance(Duration, Reply<RadioState>),
    Snapshot(Reply<(RegisterBank, RadioState, HardwareModel)>),
    Stop,
}

pub struct ControlActor {
    tx: Sender<Msg>,
    worker: Option<JoinHandle<()>>,
}

fn gone() -> Error {
    Error::State("control actor has stopped".into())
}

impl ControlActor {
    pub fn spawn(bank: RegisterBank, latencies: LatencyTable) -> Self {
        let (tx, rx) = channel::<Msg>();
        let worker = std::thread::spawn(move || {
            let mut hw = HardwareModel::new(bank.device_id);
            let mut radio = RadioState::new(DeviceMode::Sleep, latencies);
            let mut bank = bank;
            for msg in rx {
                match msg {
                    Msg::Set(k, v, r) => {
                        let res = bank.set(&k, &v);
                        if let Ok(b) = &res {
                            bank = b.clone();
                        }
                        let _ = r.send(res);
                    }
                    Msg::Commit(r) => {
                        let res = interpret(&bank).map(|c| {
                            let d = hw.apply(&c);
                            (c, d)
                        });
                        let _ = r.send(res);
                    }
                    Msg::Transition(m, r) => {
                        let (s, sched) = radio.transition(m);
                        radio = s;
                        let _ = r.send(Ok(sched));
                    }
                    Msg::Advance(dt, r) => {
                        radio = radio.advance(dt);
                        let _ = r.send(Ok(radio.clone()));
                    }
                    Msg::Snapshot(r) => {
                        let _ = r.send(Ok((bank.clone(), radio.clone(), hw.clone())));
                    }
                    Msg::Stop => break,
                }
            }
        });
        Self {
            tx,
            worker: Some(worker),
        }
    }

    fn call<T>(&self, make: impl FnOnce(Reply<T>) -> Msg) -> Result<T> {
        let (rtx, rrx) = channel();
        self.tx.send(make(rtx)).map_err(|_| gone())?;
        rrx.recv().map_err(|_| gone())?
    }

    pub fn set(&self, key: &str, value: &str) -> Result<RegisterBank> {
        self.call(|r| Msg::Set(key.into(), value.into(), r))
    }

    /// Interprets the current bank and applies it to the hardware model.
    pub fn commit(&self) -> Result<(Vec<Command>, Vec<String>)> {
        self.call(Msg::Commit)
    }

    pub fn transition(&self, target: DeviceMode) -> Result<Vec<(LatencyComponent, Duration)>> {
        self.call(|r| Msg::Transition(target, r))
    }

    pub fn advance(&self, dt: Duration) -> Result<RadioState> {
        self.call(|r| Msg::Advance(dt, r))
    }

    pub fn snapshot(&self) -> Result<(RegisterBank, RadioState, HardwareModel)> {
        self.call(Msg::Snapshot)
    }
}

impl Drop for ControlActor {
    fn drop(&mut self) {
        let _ = self.tx.send(Msg::Stop);
        if let Some(w) = self.worker.take() {
            let _ = w.join();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn actor_roundtrip() {
        let a = ControlActor::spawn(RegisterBank::default(), LatencyTable::default());
        a.set("mode", "active").unwrap();
        assert!(a.set("freq", "7GHz").is_err());
        a.set("freq", "915MHz").unwrap();
        let (cmds, diag) = a.commit().unwrap();
        assert!(diag.is_empty());
        assert!(cmds.iter().any(|c| matches!(c, Command::TunePll { .. })));
        let sched = a.transition(DeviceMode::Active).unwrap();
        assert_eq!(sched.len(), 4);
        let r = a.advance(Duration::from_micros(88_800)).unwrap();
        assert_eq!(r.current, DeviceMode::Active);
        let (bank, _, hw) = a.snapshot().unwrap();
        assert_eq!(bank.freq, Some(915e6));
        assert_eq!(hw.pll, Some((915e6, 0.0)));
    }
}
