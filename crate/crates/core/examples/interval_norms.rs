//! Interval matrices: arithmetic, the two supremum norms and the interval exponential.
use uncertain_reach::interval::{Interval, IntervalMatrix, DEFAULT_EXP_ORDER};
use uncertain_reach::linalg::Matrix;

fn main() -> uncertain_reach::error::Result<()> {
    let lambda = IntervalMatrix::from_fn(2, 2, |i, j| match (i, j) {
        (0, 0) => Interval::new(-0.1, 0.2).unwrap(),
        (1, 1) => Interval::centered(0.0, 0.15).unwrap(),
        _ => Interval::ZERO,
    });
    println!("frobenius sup = {:.6}", lambda.frobenius_sup());
    println!("2-norm sup    = {:.6}", lambda.two_norm_sup()?);
    let (vertex, sigma) = lambda.max_sv_candidate()?;
    println!("attained at the vertex {:?} (sigma {sigma:.6})", vertex.as_slice());

    let a = Matrix::from_row_slice(2, 2, &[-1.0, -4.0, 4.0, -1.0]);
    let sum = IntervalMatrix::point(&a).add(&lambda)?;
    let e = sum.exp(0.01, DEFAULT_EXP_ORDER)?;
    println!("exp((A + Λ) 0.01):");
    for i in 0..2 {
        let row: Vec<String> = (0..2)
            .map(|j| format!("[{:.8}, {:.8}]", e.get(i, j).lo(), e.get(i, j).hi()))
            .collect();
        println!("  {}", row.join("  "));
    }
    Ok(())
}
