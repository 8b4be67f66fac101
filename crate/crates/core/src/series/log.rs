//! Series extended by the formal symbol `log(eps z)`.

use crate::arith::EpsLaurent;
use crate::error::{Error, Result};

use super::ZSeries;

/// `plain(z) + logpart(z) * log(eps z)`. The symbol is never expanded.
#[derive(Clone, Debug)]
pub struct LogSeries {
    pub plain: ZSeries,
    pub logpart: ZSeries,
}

impl LogSeries {
    pub fn new(plain: ZSeries, logpart: ZSeries) -> Self {
        LogSeries { plain, logpart }
    }

    pub fn from_plain(plain: ZSeries) -> Self {
        let order = plain.order();
        LogSeries {
            plain,
            logpart: ZSeries::zero(-order - 1, order),
        }
    }

    /// `log(eps z)` itself.
    pub fn log(order: i64) -> Self {
        LogSeries {
            plain: ZSeries::zero(0, order),
            logpart: ZSeries::one(order),
        }
    }

    pub fn add(&self, other: &LogSeries) -> LogSeries {
        LogSeries {
            plain: self.plain.add(&other.plain),
            logpart: self.logpart.add(&other.logpart),
        }
    }

    pub fn sub(&self, other: &LogSeries) -> LogSeries {
        LogSeries {
            plain: self.plain.sub(&other.plain),
            logpart: self.logpart.sub(&other.logpart),
        }
    }

    /// Product with a log-free series.
    pub fn mul_plain(&self, a: &ZSeries) -> LogSeries {
        LogSeries {
            plain: self.plain.mul(a),
            logpart: self.logpart.mul(a),
        }
    }

    pub fn scale(&self, c: &EpsLaurent) -> LogSeries {
        LogSeries {
            plain: self.plain.scale(c),
            logpart: self.logpart.scale(c),
        }
    }

    /// `d/dz (P + Q log(eps z)) = (P' + Q/z) + Q' log(eps z)`.
    pub fn derivative(&self) -> LogSeries {
        LogSeries {
            plain: self.plain.derivative().add(&self.logpart.z_shift(-1)),
            logpart: self.logpart.derivative(),
        }
    }

    /// The plain part, provided the log part vanishes on its window.
    pub fn into_plain(self) -> Result<ZSeries> {
        if let Some((d, _)) = self.logpart.terms().next_back() {
            return Err(Error::LogPartNonzero(d));
        }
        Ok(self.plain)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::Rat;

    fn z(d: i64, order: i64) -> ZSeries {
        ZSeries::monomial(EpsLaurent::one(), d, order)
    }

    #[test]
    fn derivative_of_log() {
        let d = LogSeries::log(4).derivative();
        assert!(d.plain.eq_on_window(&z(-1, 4)));
        assert!(d.logpart.is_zero());
    }

    #[test]
    fn derivative_of_inverse() {
        let d = LogSeries::from_plain(z(-1, 4)).derivative();
        assert!(d
            .plain
            .eq_on_window(&z(-2, 4).scale(&EpsLaurent::constant(Rat::from_int(-1)))));
        assert!(d.into_plain().is_ok());
    }

    #[test]
    fn product_rule() {
        let zlog = LogSeries::new(ZSeries::zero(1, 4), z(1, 4));
        let d = zlog.derivative();
        assert!(d.plain.eq_on_window(&ZSeries::one(4)));
        assert!(d.logpart.eq_on_window(&ZSeries::one(4)));
        assert_eq!(d.into_plain().unwrap_err(), Error::LogPartNonzero(0));
    }
}
