//! Stars with box predicates: maps, sums, supports, reductions and interval images.
use uncertain_reach::interval::{Interval, IntervalMatrix};
use uncertain_reach::linalg::{Matrix, Vector};
use uncertain_reach::star::{Hyperbox, Star};

fn show(label: &str, s: &Star) {
    let b = s.bounding_box();
    let bounds: Vec<String> = b.intervals().iter().map(|iv| format!("[{:.4}, {:.4}]", iv.lo(), iv.hi())).collect();
    println!("{label:<22} {} generators, box {}", s.num_generators(), bounds.join(" x "));
}

fn main() -> uncertain_reach::error::Result<()> {
    let square = Star::from_box(&Hyperbox::from_bounds(&[[-1.0, 1.0], [-1.0, 1.0]])?);
    let (c, s) = (std::f64::consts::FRAC_PI_4.cos(), std::f64::consts::FRAC_PI_4.sin());
    let rot = Matrix::from_row_slice(2, 2, &[c, -s, s, c]);
    let diamond = square.linear_map(&rot)?;
    show("rotated square", &diamond);

    let sum = diamond.minkowski_sum(&square)?;
    show("diamond + square", &sum);
    let d = Vector::from_vec(vec![1.0, 1.0]);
    println!("support along (1,1): {:.4}", sum.support(&d)?);

    show("interval reduction", &sum.interval_reduce());
    show("zonotope reduction", &sum.zonotope_reduce(3)?);

    let lambda = IntervalMatrix::from_fn(2, 2, |i, j| {
        if i == j { Interval::new(-0.1, 0.1).unwrap() } else { Interval::ZERO }
    });
    show("hull image Λ·S", &diamond.interval_image_hull(&lambda)?);
    show("per-generator Λ·S", &diamond.interval_image_box(&lambda)?);
    Ok(())
}
