use crate::error::{Error, Result};
use crate::scalar::Real;
use num_complex::Complex;
use std::fmt;
use std::sync::Arc;

pub type EvalFn<T> = Arc<dyn Fn(&[T]) -> Complex<T> + Send + Sync>;
pub type GradFn<T> = Arc<dyn Fn(&[T]) -> Vec<Complex<T>> + Send + Sync>;

/// How gradients are obtained when no analytic gradient is attached.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FdMode {
    Central,
    /// Central differences at `h` and `h/2`, combined as `(4 D(h/2) − D(h)) / 3`.
    Richardson,
}

/// Named complex-valued function of the real coordinate vector.
#[derive(Clone)]
pub struct Observable<T> {
    pub name: String,
    eval: EvalFn<T>,
    grad: Option<GradFn<T>>,
    fd: FdMode,
}

impl<T> fmt::Debug for Observable<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Observable").field("name", &self.name).field("analytic_grad", &self.grad.is_some()).finish()
    }
}

impl<T: Real> Observable<T> {
    pub fn new<F>(name: impl Into<String>, f: F) -> Self
    where
        F: Fn(&[T]) -> Complex<T> + Send + Sync + 'static,
    {
        Observable { name: name.into(), eval: Arc::new(f), grad: None, fd: FdMode::Central }
    }

    /// Real-valued convenience constructor.
    pub fn real<F>(name: impl Into<String>, f: F) -> Self
    where
        F: Fn(&[T]) -> T + Send + Sync + 'static,
    {
        Self::new(name, move |x| Complex::new(f(x), T::zero()))
    }

    pub fn with_grad<G>(mut self, g: G) -> Self
    where
        G: Fn(&[T]) -> Vec<Complex<T>> + Send + Sync + 'static,
    {
        self.grad = Some(Arc::new(g));
        self
    }

    pub fn with_fd(mut self, mode: FdMode) -> Self {
        self.fd = mode;
        self
    }

    /// Drops the analytic gradient, forcing finite differences.
    pub fn without_grad(mut self) -> Self {
        self.grad = None;
        self
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn has_grad(&self) -> bool {
        self.grad.is_some()
    }

    #[inline]
    pub fn eval(&self, x: &[T]) -> Complex<T> {
        (self.eval)(x)
    }

    /// Coordinate function `x_i`.
    pub fn coordinate(name: impl Into<String>, i: usize, dim: usize) -> Self {
        Self::real(name, move |x| x[i]).with_grad(move |_| {
            let mut g = vec![Complex::new(T::zero(), T::zero()); dim];
            g[i] = Complex::new(T::one(), T::zero());
            g
        })
    }

    /// Complex coordinate `x_re + i x_im`.
    pub fn complex_coordinate(name: impl Into<String>, re: usize, im: usize, dim: usize) -> Self {
        Self::new(name, move |x| Complex::new(x[re], x[im])).with_grad(move |_| {
            let mut g = vec![Complex::new(T::zero(), T::zero()); dim];
            g[re] = Complex::new(T::one(), T::zero());
            g[im] = Complex::new(T::zero(), T::one());
            g
        })
    }

    pub fn constant(name: impl Into<String>, c: Complex<T>) -> Self {
        Self::new(name, move |_| c).with_grad(move |x| vec![Complex::new(T::zero(), T::zero()); x.len()])
    }

    /// Gradient with respect to the real coordinates: analytic if attached,
    /// otherwise finite differences.
    pub fn gradient(&self, x: &[T]) -> Result<Vec<Complex<T>>> {
        let g = match &self.grad {
            Some(g) => g(x),
            None => self.fd_gradient(x, self.fd)?,
        };
        if g.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::Evaluation(format!("non-finite gradient of {}", self.name)));
        }
        Ok(g)
    }

    /// Central finite-difference gradient with step `h·max(1, |x_i|)`.
    pub fn fd_gradient(&self, x: &[T], mode: FdMode) -> Result<Vec<Complex<T>>> {
        let mut y = x.to_vec();
        let mut out = Vec::with_capacity(x.len());
        let two = T::lit(2.0);
        for i in 0..x.len() {
            let h = T::fd_step() * x[i].abs().max(T::one());
            let mut central = |h: T| {
                y[i] = x[i] + h;
                let fp = self.eval(&y);
                y[i] = x[i] - h;
                let fm = self.eval(&y);
                y[i] = x[i];
                (fp - fm) / (two * h)
            };
            let d = match mode {
                FdMode::Central => central(h),
                FdMode::Richardson => {
                    let d1 = central(h);
                    let d2 = central(h / two);
                    (d2 * T::lit(4.0) - d1) / T::lit(3.0)
                }
            };
            if !d.re.is_finite() || !d.im.is_finite() {
                return Err(Error::Evaluation(format!(
                    "finite differencing of {} failed in coordinate {i}",
                    self.name
                )));
            }
            out.push(d);
        }
        Ok(out)
    }

    /// Complex conjugate observable.
    pub fn conj(&self) -> Self {
        let f = self.eval.clone();
        let mut o = Observable::new(format!("conj({})", self.name), move |x| f(x).conj());
        if let Some(g) = self.grad.clone() {
            o = o.with_grad(move |x| g(x).into_iter().map(|c| c.conj()).collect());
        }
        o.fd = self.fd;
        o
    }

    /// `c·f`.
    pub fn scale(&self, c: Complex<T>) -> Self {
        let f = self.eval.clone();
        let mut o = Observable::new(format!("({c})*{}", self.name), move |x| f(x) * c);
        if let Some(g) = self.grad.clone() {
            o = o.with_grad(move |x| g(x).into_iter().map(|d| d * c).collect());
        }
        o.fd = self.fd;
        o
    }

    /// `f + g`.
    pub fn add(&self, other: &Self) -> Self {
        let (f, g) = (self.eval.clone(), other.eval.clone());
        let mut o = Observable::new(format!("{}+{}", self.name, other.name), move |x| f(x) + g(x));
        if let (Some(df), Some(dg)) = (self.grad.clone(), other.grad.clone()) {
            o = o.with_grad(move |x| df(x).into_iter().zip(dg(x)).map(|(a, b)| a + b).collect());
        }
        o
    }

    /// Pointwise product `f·g`, with the Leibniz gradient when both are analytic.
    pub fn mul(&self, other: &Self) -> Self {
        let (f, g) = (self.eval.clone(), other.eval.clone());
        let mut o = Observable::new(format!("{}*{}", self.name, other.name), move |x| f(x) * g(x));
        if let (Some(df), Some(dg)) = (self.grad.clone(), other.grad.clone()) {
            let (f, g) = (self.eval.clone(), other.eval.clone());
            o = o.with_grad(move |x| {
                let (fx, gx) = (f(x), g(x));
                df(x).into_iter().zip(dg(x)).map(|(a, b)| a * gx + b * fx).collect()
            });
        }
        o
    }
}

/// Converts Wirtinger derivatives `(∂_z f, ∂_z̄ f)` into the real-coordinate
/// pair `(∂_x f, ∂_y f)` for `z = x + iy`.
#[inline]
pub fn wirtinger<T: Real>(dz: Complex<T>, dzbar: Complex<T>) -> [Complex<T>; 2] {
    let i = Complex::new(T::zero(), T::one());
    [dz + dzbar, (dz - dzbar) * i]
}
