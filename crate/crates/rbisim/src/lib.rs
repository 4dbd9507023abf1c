/*!
Decision procedures for behavioural equivalence of resources in labeled
Petri nets.

A resource is a multiset of places.  Two resources are considered
interchangeable when one can replace the other inside any larger marking
without changing the observable behaviour.  This crate works with the
coarsest such relation that can still be checked step by step: the
largest transfer-closed congruence, decided by a terminating tableau
search.

The pieces:

* [`multiset`]: multiset algebra over an ordered place universe,
  including the cardinality-lexicographic well order used everywhere.
* [`net`]: labeled Petri nets, a line-oriented text format, plain and
  completed (context-borrowing) firing.
* [`strata`]: level-indexed approximations of both the classic marking
  bisimulation game and the completed-firing game, equivalence levels,
  a bounded refuter for context-closed similarity, and a transfer-step
  checker for hand-built relations.
* [`tableau`]: the terminating proof search itself, with certificates
  that an independent checker re-validates against the net.
* [`basis`]: minimal-pair bases of the equivalence within a bound.
* [`cli`]: the `rbisim` command line (`check`, `eqlev`, `refute-sim`,
  `verify`, `basis`, `parse`).
* [`testkit`]: seeded random nets and resources for cross-checking.

Start with `examples/` in the crate root; each file there exercises one
capability end to end, e.g.

```text
cargo run --example check_bisimilarity
cargo run --example certificates
cargo run --example enumerate_basis
```
*/

pub mod basis;
pub mod cli;
pub mod multiset;
pub mod net;
pub mod strata;
pub mod tableau;
pub mod testkit;

pub use multiset::{pair_leq, Multiset, Universe};
pub use net::{CompletedStep, Firing, LabeledPetriNet, Transition};
