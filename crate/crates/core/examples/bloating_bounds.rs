//! The three closed-form bloating factors against the measured deviation.
use uncertain_reach::bounds::{bloat_series, BoundMethod, NormKind};
use uncertain_reach::interval::{Interval, IntervalMatrix};
use uncertain_reach::linalg::{expm, spectral_norm, Matrix};

fn main() -> uncertain_reach::error::Result<()> {
    let a = Matrix::from_row_slice(2, 2, &[-1.0, -4.0, 4.0, -1.0]);
    let mut lambda = IntervalMatrix::zeros(2, 2);
    lambda.set(0, 0, Interval::centered(0.0, 0.02)?);
    lambda.set(1, 1, Interval::centered(0.0, 0.08)?);
    let times = [0.1, 0.5, 1.0, 2.0];

    // a vertex of Λ, to compare against
    let e = Matrix::from_row_slice(2, 2, &[0.02, 0.0, 0.0, -0.08]);
    print!("{:>14}", "t");
    for t in times {
        print!("{t:>12}");
    }
    println!();
    print!("{:>14}", "measured");
    for t in times {
        let nominal = expm(&a, t);
        print!("{:>12.4e}", spectral_norm(&(expm(&(&a + &e), t) - &nominal)) / spectral_norm(&nominal));
    }
    println!();
    for method in BoundMethod::ALL {
        for norm in [NormKind::Two, NormKind::Frobenius] {
            let s = bloat_series(&a, &lambda, &times, method, norm)?;
            print!("{:>14}", format!("{method}/{}", &norm.name()[..3]));
            for phi in s.phi {
                print!("{phi:>12.4e}");
            }
            println!();
        }
    }
    Ok(())
}
