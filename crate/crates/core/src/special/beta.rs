use crate::error::{domain, Error, Result};

use super::gamma::{gamma, ln_gamma};

/// Complete Beta function `B(p, q) = Γ(p)Γ(q)/Γ(p+q)`.
pub fn beta(p: f64, q: f64) -> Result<f64> {
    if !(p > 0.0) || !(q > 0.0) {
        return Err(domain(format!("beta requires p, q > 0 (p={p}, q={q})")));
    }
    if p + q < 150.0 {
        Ok(gamma(p)? * gamma(q)? / gamma(p + q)?)
    } else {
        Ok((ln_gamma(p)? + ln_gamma(q)? - ln_gamma(p + q)?).exp())
    }
}

/// Lower incomplete Beta function `B(z; p, q) = ∫₀^z u^{p-1} (1-u)^{q-1} du`.
///
/// Not regularized. Both endpoint singularities (`p < 1` at `u = 0`, `q < 1` at
/// `u = 1`) are handled by the continued fraction, which never samples the
/// integrand.
pub fn incomplete_beta(z: f64, p: f64, q: f64) -> Result<f64> {
    check(z, p, q)?;
    if z == 0.0 {
        return Ok(0.0);
    }
    if z == 1.0 {
        return beta(p, q);
    }
    if z < (p + 1.0) / (p + q + 2.0) {
        Ok(front(z, p, q) * continued_fraction(z, p, q)? / p)
    } else {
        let w = 1.0 - z;
        Ok(beta(p, q)? - front(w, q, p) * continued_fraction(w, q, p)? / q)
    }
}

/// Regularized incomplete Beta function `I_z(p, q) = B(z; p, q) / B(p, q)`.
pub fn regularized_incomplete_beta(z: f64, p: f64, q: f64) -> Result<f64> {
    check(z, p, q)?;
    if z == 0.0 {
        return Ok(0.0);
    }
    if z == 1.0 {
        return Ok(1.0);
    }
    let lnb = ln_gamma(p)? + ln_gamma(q)? - ln_gamma(p + q)?;
    if z < (p + 1.0) / (p + q + 2.0) {
        Ok((p * z.ln() + q * (1.0 - z).ln() - lnb).exp() * continued_fraction(z, p, q)? / p)
    } else {
        let w = 1.0 - z;
        Ok(1.0 - (q * w.ln() + p * z.ln() - lnb).exp() * continued_fraction(w, q, p)? / q)
    }
}

fn check(z: f64, p: f64, q: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&z) || !(p > 0.0) || !(q > 0.0) {
        return Err(domain(format!("incomplete beta requires 0 <= z <= 1, p > 0, q > 0 (z={z}, p={p}, q={q})")));
    }
    Ok(())
}

fn front(z: f64, p: f64, q: f64) -> f64 {
    z.powf(p) * (1.0 - z).powf(q)
}

// Modified Lentz evaluation of the standard continued fraction for I_z(p, q).
fn continued_fraction(z: f64, p: f64, q: f64) -> Result<f64> {
    const TINY: f64 = 1e-300;
    const EPS: f64 = 1e-16;
    let qab = p + q;
    let qap = p + 1.0;
    let qam = p - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * z / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..10_000 {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (q - m) * z / ((qam + m2) * (p + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(p + m) * (qab + m) * z / ((p + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            return Ok(h);
        }
    }
    Err(Error::IterationLimit("incomplete beta continued fraction"))
}
