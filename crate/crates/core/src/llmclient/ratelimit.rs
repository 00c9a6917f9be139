//! Token-bucket rate limiting over a pluggable clock, so timing behavior
//! is testable without wall-clock sleeps.

use std::sync::{Arc, Mutex};
use std::time::Duration;

/// Monotonic time source. The fake implementation advances itself on
/// sleep, which lets tests assert bucket timing exactly.
pub trait Clock: Send + Sync {
    fn now(&self) -> Duration;
    fn sleep(&self, duration: Duration);
}

/// Wall-clock time.
pub struct SystemClock {
    start: std::time::Instant,
}

impl SystemClock {
    pub fn new() -> Self {
        SystemClock {
            start: std::time::Instant::now(),
        }
    }
}

impl Default for SystemClock {
    fn default() -> Self {
        SystemClock::new()
    }
}

impl Clock for SystemClock {
    fn now(&self) -> Duration {
        self.start.elapsed()
    }

    fn sleep(&self, duration: Duration) {
        std::thread::sleep(duration);
    }
}

/// A clock that only moves when slept on.
#[derive(Default)]
pub struct FakeClock {
    now: Mutex<Duration>,
}

impl FakeClock {
    pub fn new() -> Arc<Self> {
        Arc::new(FakeClock::default())
    }
}

impl Clock for FakeClock {
    fn now(&self) -> Duration {
        *self.now.lock().expect("clock lock")
    }

    fn sleep(&self, duration: Duration) {
        *self.now.lock().expect("clock lock") += duration;
    }
}

struct BucketState {
    tokens: f64,
    last_refill: Duration,
}

/// Classic token bucket: capacity `burst`, refilled at `rate_per_sec`.
pub struct RateLimiter {
    rate_per_sec: f64,
    burst: f64,
    state: Mutex<BucketState>,
    clock: Arc<dyn Clock>,
}

impl RateLimiter {
    pub fn new(rate_per_sec: f64, clock: Arc<dyn Clock>) -> Self {
        assert!(rate_per_sec > 0.0, "rate must be positive");
        let burst = rate_per_sec.max(1.0);
        RateLimiter {
            rate_per_sec,
            burst,
            state: Mutex::new(BucketState {
                tokens: burst,
                last_refill: clock.now(),
            }),
            clock,
        }
    }

    pub fn with_system_clock(rate_per_sec: f64) -> Self {
        RateLimiter::new(rate_per_sec, Arc::new(SystemClock::new()))
    }

    /// Block until a token is available, then take it.
    pub fn acquire(&self) {
        loop {
            let wait = {
                let mut state = self.state.lock().expect("limiter lock");
                let now = self.clock.now();
                let elapsed = now.saturating_sub(state.last_refill);
                state.tokens =
                    (state.tokens + elapsed.as_secs_f64() * self.rate_per_sec).min(self.burst);
                state.last_refill = now;
                if state.tokens >= 1.0 {
                    state.tokens -= 1.0;
                    return;
                }
                Duration::from_secs_f64((1.0 - state.tokens) / self.rate_per_sec)
            };
            self.clock.sleep(wait);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn six_requests_at_two_per_second_take_two_seconds() {
        let clock = FakeClock::new();
        let limiter = RateLimiter::new(2.0, clock.clone());
        for _ in 0..6 {
            limiter.acquire();
        }
        // Burst of 2 immediately, then one every 0.5s: 2.0s total.
        assert!(clock.now() >= Duration::from_secs(2), "took {:?}", clock.now());
    }

    #[test]
    fn burst_is_not_delayed() {
        let clock = FakeClock::new();
        let limiter = RateLimiter::new(4.0, clock.clone());
        for _ in 0..4 {
            limiter.acquire();
        }
        assert_eq!(clock.now(), Duration::ZERO);
    }

    #[test]
    fn refill_caps_at_burst() {
        let clock = FakeClock::new();
        let limiter = RateLimiter::new(2.0, clock.clone());
        limiter.acquire();
        limiter.acquire();
        clock.sleep(Duration::from_secs(60));
        // A long idle period still allows only `burst` immediate tokens.
        limiter.acquire();
        limiter.acquire();
        let after_idle = clock.now();
        limiter.acquire();
        assert!(clock.now() > after_idle);
    }
}
