//! Derives the diffusive projection vectors in exact arithmetic and checks
//! them order by order.

use holifd::derive::{derive_projectors, derive_projectors_with, verify_projector, AdjointProblem, GammaSeries, TangentSeries};

fn main() -> holifd::Result<()> {
    let problem = AdjointProblem::diffusive();
    let e = TangentSeries::from_subgrid(problem.clone())?;

    let z = derive_projectors(2, &e)?;
    print!("{}", z.coefficient_table());
    println!("matches the three-point closed form: {}", z == GammaSeries::closed_form_order_two(problem));

    let report = verify_projector(&z, &e, 1)?;
    println!("{} checks through gamma^1, exact: {}", report.entries().len(), report.is_exact());

    // the truncation shows up one order later
    let report = verify_projector(&z, &e, 2)?;
    println!("defects at gamma^2: {}", report.defects().count());

    let wide = derive_projectors_with(3, &e, true)?;
    println!("five-element stencil exact through gamma^2: {}", verify_projector(&wide, &e, 2)?.is_exact());
    println!("{}", serde_json::to_string_pretty(&wide.to_json())?);
    Ok(())
}
