use crate::dd::DoubleDouble;
use crate::error::Result;
use crate::interval::Interval;

/// A smooth real function on an interval with derivatives of every order
/// the caller requests. Divided differences, criterion matrices and
/// transforms are all written against this trait; `FunctionModel` is the
/// closed-form implementation and the transform evaluators provide
/// derived ones.
pub trait Curve: Send + Sync {
    fn domain(&self) -> Interval;

    fn value(&self, t: f64) -> Result<f64>;

    /// Exact k-th derivative; `k = 0` reduces to `value`.
    fn derivative(&self, t: f64, k: u32) -> Result<f64>;

    /// Short human-readable descriptor used in reports.
    fn describe(&self) -> String;

    /// Extended-precision value seed for the double-double recurrence.
    /// The default promotes the f64 value; models whose families admit
    /// cheap double-double evaluation override it.
    fn value_dd(&self, t: f64) -> Result<DoubleDouble> {
        Ok(DoubleDouble::from_f64(self.value(t)?))
    }

    fn derivative_dd(&self, t: f64, k: u32) -> Result<DoubleDouble> {
        Ok(DoubleDouble::from_f64(self.derivative(t, k)?))
    }
}
