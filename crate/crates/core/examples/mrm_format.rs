//! Text formats: a two-state world written as explicit MDP and labeling
//! files plus a `.mrm` machine, loaded as a custom domain, solved, and
//! written back out.
//!
//! cargo run --example mrm_format

use mrm_learn::io::explicit::{emit_labeling, emit_mdp, parse_labeling, parse_mdp};
use mrm_learn::io::mrm::{emit_mrm, parse_mrm};
use mrm_learn::product::product;
use mrm_learn::solver::{value_iteration, DEFAULT_GAMMA, DEFAULT_TOLERANCE};
use mrm_learn::Domain;

const MDP: &str = "\
states: home shop
actions: walk wait
initial: home
home walk shop 0.8
home walk home 0.2
home wait home 1
shop walk home 1
shop wait shop 1
";

const LABELS: &str = "\
walk shop buy     # arriving at the shop
walk home back
";

const MACHINE: &str = "\
alphabet: buy back
start: u0
default: -1
u0 buy u1 5       # the first purchase pays
u1 back u0 1      # and so does coming home with it
";

fn main() {
    let machine = parse_mrm(MACHINE).expect("valid machine");
    let mdp = parse_mdp(MDP).expect("valid MDP");
    let labeling = parse_labeling(LABELS, &mdp, machine.alphabet()).expect("valid labels");
    let starts = vec![mdp.initial()];
    let domain = Domain::new("errands", mdp, labeling, machine, starts).expect("consistent files");

    let p = product(&domain.mdp, &domain.labeling, &domain.target).expect("matching alphabets");
    let (values, _) = value_iteration(&p, DEFAULT_GAMMA, DEFAULT_TOLERANCE).expect("solver converges");
    println!("V(home, u0) = {:.4}\n", values.get(p.initial()));

    print!("{}", emit_mdp(&domain.mdp));
    println!();
    print!("{}", emit_labeling(&domain.labeling, &domain.mdp));
    println!();
    print!("{}", emit_mrm(&domain.target));
}
