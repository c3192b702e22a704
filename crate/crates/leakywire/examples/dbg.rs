fn main() {
    let spec = leakywire::transverse::TransverseSpec::dirichlet_plus(10.0, 4.0).unwrap();
    let mode = leakywire::transverse::solve_transverse(&spec).unwrap();
    println!("zeta = {:.17e}, k = {:.17}, lo = {:.17e}, hi = {:.17e}, wb = {}", mode.zeta, mode.k, mode.bound_lo, mode.bound_hi, mode.within_bounds);
    let rm2 = leakywire::transverse::TransverseSpec::robin_minus(1.2, 10.0, 1.0).unwrap();
    println!("rm2 count = {}", leakywire::transverse::count_negative_modes(&rm2));
    let rm = leakywire::transverse::TransverseSpec::robin_minus(0.48, 25.0, 1.0).unwrap();
    println!("rm count = {}", leakywire::transverse::count_negative_modes(&rm));
}
