use crate::numkernel::{ComplexMatrix, HermitianMatrix, C64};
use crate::tuples::{sum_of_squares, OperatorTuple};
use crate::{Error, Result};

/// Checks that `2j` is a nonnegative integer and returns it.
pub fn spin_multiplicity(j: f64) -> Result<usize> {
    let two_j = 2.0 * j;
    if !(j >= 0.0 && j.is_finite()) || (two_j - two_j.round()).abs() > 1e-12 || two_j > 1e6 {
        return Err(Error::invalid(format!("spin j must be a nonnegative half-integer, got {j}")));
    }
    Ok(two_j.round() as usize + 1)
}

/// `(L_x, L_y, L_z)` on the irreducible spin-`j` block, basis `m = j, j-1, ..., -j`.
pub fn angular_momentum_block(j: f64, hbar: f64) -> Result<OperatorTuple> {
    if !(hbar.is_finite() && hbar != 0.0) {
        return Err(Error::invalid(format!("hbar must be finite and nonzero, got {hbar}")));
    }
    let dim = spin_multiplicity(j)?;
    let m_of = |idx: usize| j - idx as f64;
    let casimir = j * (j + 1.0);
    // raising operator: L_+ |m> = hbar sqrt(j(j+1) - m(m+1)) |m+1>
    let raise = ComplexMatrix::from_fn(dim, dim, |r, c| {
        if c == r + 1 {
            let m = m_of(c);
            C64::new(hbar * (casimir - m * (m + 1.0)).max(0.0).sqrt(), 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    })?;
    let lower = raise.adjoint();
    let lx = (&raise + &lower).scale(C64::new(0.5, 0.0));
    let ly = (&raise - &lower).scale(C64::new(0.0, -0.5));
    let lz = HermitianMatrix::from_real_diagonal(&(0..dim).map(|i| hbar * m_of(i)).collect::<Vec<_>>())?;
    OperatorTuple::new(
        format!("angular_momentum(j={j},hbar={hbar})"),
        vec![HermitianMatrix::new(lx)?, HermitianMatrix::new(ly)?, lz],
        None,
    )
}

/// `L^2 = L_x^2 + L_y^2 + L_z^2`.
pub fn casimir(t: &OperatorTuple) -> HermitianMatrix {
    sum_of_squares(t)
}
