//! L* with a perfect teacher: learns the treasure machine from direct
//! membership answers and exact equivalence checks, then prints the final
//! observation table.
//!
//! cargo run --example lstar_perfect_teacher

use mrm_learn::env::{treasure_machine, TREASURE_DEFAULT_REWARD};
use mrm_learn::lstar::{learn, MachineTeacher};
use mrm_learn::ObservationTable;

fn main() {
    let target = treasure_machine(TREASURE_DEFAULT_REWARD);
    let table = ObservationTable::new(target.alphabet().clone())
        .expect("non-empty alphabet")
        .with_default_reward(target.default_reward());
    let (learned, stats, table) = learn(table, &mut MachineTeacher::new(&target)).expect("perfect answers");

    println!("{table}");
    println!("{learned}");
    println!(
        "{} membership queries, {} equivalence queries, hypothesis sizes {:?}",
        stats.membership_queries, stats.equivalence_queries, stats.hypothesis_sizes
    );
    assert_eq!(learned.equivalent(&target).expect("same alphabet"), None);
}
