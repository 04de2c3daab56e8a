use sym3_core::characters::*;
use sym3_core::LocalFieldSpec;
fn main() {
    let base = unit_group(LocalFieldSpec::base(3), 1).unwrap();
    let k_field = LocalFieldSpec::ramified_plus(3);
    let omega = norm_residue_character(k_field, 1).unwrap();
    for chi in all_characters(&base) {
        let a = chi.conductor();
        let a_om = chi.product(&omega).conductor();
        let om = omega.conductor();
        let inflated = inflate_by_norm(&chi, k_field, 1).unwrap();
        println!(
            "chi exps {:?}: a={} a_om={} om={} inflated exps {:?} a(infl)={}",
            chi.unit_exponents, a, a_om, om, inflated.unit_exponents, inflated.conductor()
        );
        let kg = &inflated.group;
        println!("  K gens: {:?} orders {:?}", kg.generators, kg.orders);
        for g in &kg.generators {
            println!("  N({:?}) = {}", g, kg.ring.norm(*g));
        }
    }
}
