//! Rank the cells of a dynamics matrix by their effect on the largest singular value.
use uncertain_reach::linalg::Matrix;
use uncertain_reach::sensitivity::{order_cells, order_cells_discrete};

fn main() -> uncertain_reach::error::Result<()> {
    let a = Matrix::from_row_slice(3, 3, &[-0.5, 2.0, 0.0, 0.1, -1.0, 0.3, 0.0, 0.7, -2.0]);
    let ord = order_cells(&a)?;
    println!("rank  cell    score");
    for (k, &(i, j)) in ord.ranking.iter().enumerate() {
        println!("{:>4}  ({i},{j})  {:.6}", k + 1, ord.score(i, j));
    }
    let discrete = order_cells_discrete(&a, 0.01)?;
    println!("top 3 on A: {:?}; on exp(0.01 A): {:?}", ord.top(3), discrete.top(3));

    // a scaled rotation has two equal singular values, so no ordering exists
    let rotation = Matrix::from_row_slice(2, 2, &[-1.0, -4.0, 4.0, -1.0]);
    if let Err(e) = order_cells(&rotation) {
        println!("rotation: {e}");
    }
    Ok(())
}
