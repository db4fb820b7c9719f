//! IME sessions keyed by random ids, with idle expiry.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};

use indic_dbcs::ime::{ConversionTable, ImeSession};
use uuid::Uuid;

pub const DEFAULT_IDLE: Duration = Duration::from_secs(30 * 60);

#[derive(Debug)]
struct Slot {
    session: ImeSession,
    created: Instant,
    last_used: Instant,
}

/// Map lock is held only to find a slot; each slot has its own lock.
#[derive(Debug)]
pub struct SessionStore {
    table: Arc<ConversionTable>,
    idle: Duration,
    slots: Mutex<HashMap<Uuid, Arc<Mutex<Slot>>>>,
}

impl SessionStore {
    pub fn new(table: Arc<ConversionTable>, idle: Duration) -> Self {
        SessionStore { table, idle, slots: Mutex::new(HashMap::new()) }
    }

    pub fn create(&self) -> (Uuid, ImeSession) {
        self.create_at(Instant::now())
    }

    pub fn create_at(&self, now: Instant) -> (Uuid, ImeSession) {
        let session = ImeSession::new(self.table.clone());
        let slot = Slot { session: session.clone(), created: now, last_used: now };
        let mut slots = self.slots.lock().unwrap();
        let mut id = Uuid::new_v4();
        while slots.contains_key(&id) {
            id = Uuid::new_v4();
        }
        slots.insert(id, Arc::new(Mutex::new(slot)));
        (id, session)
    }

    /// Runs `f` on the session with exclusive access. `None` if the id is
    /// unknown or expired.
    pub fn with<R>(&self, id: Uuid, f: impl FnOnce(&mut ImeSession) -> R) -> Option<R> {
        self.with_at(id, Instant::now(), f)
    }

    pub fn with_at<R>(&self, id: Uuid, now: Instant, f: impl FnOnce(&mut ImeSession) -> R) -> Option<R> {
        self.expire_at(now);
        let slot = self.slots.lock().unwrap().get(&id).cloned()?;
        let mut slot = slot.lock().unwrap();
        slot.last_used = now;
        Some(f(&mut slot.session))
    }

    pub fn created(&self, id: Uuid) -> Option<Instant> {
        let slot = self.slots.lock().unwrap().get(&id).cloned()?;
        let created = slot.lock().unwrap().created;
        Some(created)
    }

    /// Drops sessions idle for longer than the configured limit.
    pub fn expire_at(&self, now: Instant) {
        let idle = self.idle;
        self.slots.lock().unwrap().retain(|_, slot| match slot.try_lock() {
            Ok(s) => now.saturating_duration_since(s.last_used) <= idle,
            // In use right now, so not idle.
            Err(_) => true,
        });
    }

    pub fn len(&self) -> usize {
        self.slots.lock().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}
