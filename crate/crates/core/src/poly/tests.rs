use num::{BigRational, One, Zero};
use proptest::prelude::*;

use super::*;
use crate::ampc::{
    Action, AdaptiveProgram, AmpcAlgorithm, Key, NonAdaptive, RosterEntry, Value,
};
use crate::boolfn::promise_majority;
use crate::error::Error;

fn r(num: i64, den: i64) -> BigRational {
    BigRational::new(num.into(), den.into())
}

fn poly(n: usize, terms: &[(u32, i64)]) -> MultilinearPolynomial {
    MultilinearPolynomial::from_terms(n, terms.iter().map(|&(m, c)| (m, r(c, 1)))).unwrap()
}

// -------------------------------------------------------------------
// Interpolation and product oracles
// -------------------------------------------------------------------

#[test]
fn interpolates_conjunction_to_a_monomial() {
    let p = interpolate(2, |m| m == 0b11).unwrap();
    assert_eq!(p, poly(2, &[(0b11, 1)]));
    assert_eq!(p.degree(), 2);
}

#[test]
fn interpolates_parity_to_the_standard_form() {
    let p = interpolate(2, |m| m.count_ones() % 2 == 1).unwrap();
    assert_eq!(p, poly(2, &[(0b01, 1), (0b10, 1), (0b11, -2)]));
    assert_eq!(p.degree(), 2);
}

#[test]
fn interpolates_constant_zero_to_the_zero_polynomial() {
    let p = interpolate(3, |_| false).unwrap();
    assert!(p.is_zero());
    assert_eq!(p.degree(), 0);
}

#[test]
fn product_is_idempotent_on_a_variable() {
    let x0 = MultilinearPolynomial::variable(1, 0);
    assert_eq!(x0.multilinear_product(&x0), x0);
}

#[test]
fn product_of_complementary_indicators_vanishes() {
    let x0 = MultilinearPolynomial::variable(1, 0);
    let not_x0 = MultilinearPolynomial::constant(1, BigRational::one()).sub(&x0);
    assert!(not_x0.multilinear_product(&x0).is_zero());
}

#[test]
fn product_matches_pointwise_values() {
    let parity = poly(2, &[(0b01, 1), (0b10, 1), (0b11, -2)]);
    let x1 = MultilinearPolynomial::variable(2, 1);
    let prod = parity.multilinear_product(&x1);
    assert_eq!(prod, poly(2, &[(0b10, 1), (0b11, -1)]));
    for point in 0..4 {
        assert_eq!(prod.evaluate(point), parity.evaluate(point) * x1.evaluate(point));
    }
}

#[test]
fn dump_entries_sort_by_size_then_variables() {
    let p = MultilinearPolynomial::from_terms(
        3,
        vec![(0b110, r(-3, 2)), (0b001, r(1, 1)), (0b010, r(2, 1))],
    )
    .unwrap();
    let dump = p.dump_entries();
    let rendered: Vec<(Vec<usize>, &str)> = dump
        .iter()
        .map(|e| (e.vars.clone(), e.coef.as_str()))
        .collect();
    assert_eq!(
        rendered,
        vec![
            (vec![0], "1"),
            (vec![1], "2"),
            (vec![1, 2], "-3/2"),
        ]
    );
}

#[test]
fn dense_guard_rejects_oversized_interpolation() {
    assert!(matches!(
        interpolate(MAX_DENSE_VARS + 1, |_| false),
        Err(Error::InvalidArgument(_))
    ));
}

proptest! {
    /// interpolate ∘ evaluate is the identity on coefficient maps.
    #[test]
    fn interpolation_round_trips_random_tables(bits in proptest::collection::vec(proptest::bool::ANY, 16)) {
        let p = interpolate(4, |m| bits[m as usize]).unwrap();
        for (m, &b) in bits.iter().enumerate() {
            prop_assert_eq!(p.evaluate(m as u32), r(b as i64, 1));
        }
        let values = p.evaluate_all().unwrap();
        let q = interpolate_rational(4, &values).unwrap();
        prop_assert_eq!(p, q);
    }

    /// Sparse rational polynomials survive evaluate-then-interpolate.
    #[test]
    fn rational_round_trip(terms in proptest::collection::btree_map(0u32..64, (-6i64..6, 1i64..5), 0..10)) {
        let p = MultilinearPolynomial::from_terms(
            6,
            terms.iter().map(|(&m, &(num, den))| (m, r(num, den))),
        ).unwrap();
        let values = p.evaluate_all().unwrap();
        let q = interpolate_rational(6, &values).unwrap();
        prop_assert_eq!(p, q);
    }

    /// evaluate agrees with the dense transform at every point.
    #[test]
    fn pointwise_and_dense_evaluation_agree(terms in proptest::collection::btree_map(0u32..32, -4i64..5, 0..8)) {
        let p = MultilinearPolynomial::from_terms(
            5,
            terms.iter().map(|(&m, &c)| (m, r(c, 1))),
        ).unwrap();
        let values = p.evaluate_all().unwrap();
        for point in 0..32u32 {
            prop_assert_eq!(&values[point as usize], &p.evaluate(point));
        }
    }
}

// -------------------------------------------------------------------
// Cube tables
// -------------------------------------------------------------------

#[test]
fn disjoint_or_rejects_overlap_and_subtraction_rejects_escape() {
    let a = CubeTable::from_fn(2, |m| m & 1 == 1);
    let b = CubeTable::from_fn(2, |m| m == 0b01);
    assert!(a.or_disjoint(&b).is_err()); // overlap at 01
    let c = a.complement();
    assert_eq!(b.or_disjoint(&c).unwrap().count(), 3);
    assert_eq!(a.or_disjoint(&c).unwrap().count(), 4);
    assert!(c.subtract_subset(&b).is_err()); // b ⊄ c
    assert_eq!(a.subtract_subset(&b).unwrap().count(), 1);
}

#[test]
fn cube_table_polynomial_matches_interpolation() {
    let table = CubeTable::from_fn(3, |m| m.count_ones() >= 2);
    let p = table.to_polynomial();
    assert_eq!(p, interpolate(3, |m| m.count_ones() >= 2).unwrap());
    assert_eq!(table.degree(), p.degree());
}

proptest! {
    #[test]
    fn cube_table_round_trips(bits in proptest::collection::vec(proptest::bool::ANY, 32)) {
        let table = CubeTable::from_fn(5, |m| bits[m as usize]);
        prop_assert_eq!(table.count(), bits.iter().filter(|&&b| b).count());
        let p = table.to_polynomial();
        for point in 0..32u32 {
            prop_assert_eq!(p.evaluate(point), r(bits[point as usize] as i64, 1));
        }
        prop_assert_eq!(table.complement().count(), 32 - table.count());
    }
}

// -------------------------------------------------------------------
// Extraction: small algorithms with frozen expected polynomials
// -------------------------------------------------------------------

struct TestAlgo {
    n: usize,
    rounds: usize,
    make: Box<dyn Fn(usize) -> Vec<RosterEntry>>,
}

impl AmpcAlgorithm for TestAlgo {
    fn input_len(&self) -> usize {
        self.n
    }

    fn rounds(&self) -> usize {
        self.rounds
    }

    fn roster(&self, round: usize) -> Vec<RosterEntry> {
        (self.make)(round)
    }
}

fn copy_bit_algorithm() -> TestAlgo {
    TestAlgo {
        n: 1,
        rounds: 1,
        make: Box::new(|_| {
            vec![RosterEntry::new(
                0,
                NonAdaptive::new(vec![Key::input(0)], |responses| {
                    vec![(Key::answer(), responses[0][0])]
                }),
            )]
        }),
    }
}

#[test]
fn extracts_the_identity_polynomial() {
    let extraction =
        extract_polynomial(&copy_bit_algorithm(), 2, &ExtractOptions::default()).unwrap();
    assert_eq!(extraction.polynomial, poly(1, &[(0b1, 1)]));
    assert_eq!(extraction.degree, 1);
    assert_eq!(extraction.degree_bound, 4);
    assert!(extraction.audits_ok());
    assert_eq!(extraction.index.machines, vec![0]);
    // Two realized query sequences (x_0 = 0 and x_0 = 1), two answer
    // multisets.
    assert_eq!(extraction.index.sequence_class_counts, vec![((1, 0), 2)]);
    let (key, multisets) = &extraction.index.written_multisets[0];
    assert_eq!(*key, (1, Key::answer()));
    assert_eq!(multisets.len(), 2);
}

#[test]
fn extracts_conjunction_from_a_one_round_scan() {
    let algo = TestAlgo {
        n: 2,
        rounds: 1,
        make: Box::new(|_| {
            vec![RosterEntry::new(
                0,
                NonAdaptive::new(vec![Key::input(0), Key::input(1)], |responses| {
                    let both = responses
                        .iter()
                        .all(|resp| resp[0].as_bit() == Some(true));
                    vec![(Key::answer(), Value::scalar(both as u64))]
                }),
            )]
        }),
    };
    let extraction = extract_polynomial(&algo, 3, &ExtractOptions::default()).unwrap();
    assert_eq!(extraction.polynomial, interpolate(2, |m| m == 0b11).unwrap());
    assert_eq!(extraction.degree, 2);
    assert_eq!(extraction.degree_bound, 9);
    assert!(extraction.audits_ok());
}

/// Reads x_0, then reads x_1 or x_2 accordingly and answers what it finds.
struct AddressProgram {
    state: u8,
}

impl AdaptiveProgram for AddressProgram {
    fn resume(&mut self, response: Option<&[Value]>) -> Action {
        match self.state {
            0 => {
                self.state = 1;
                Action::Query(Key::input(0))
            }
            1 => {
                self.state = 2;
                let selector = response.unwrap()[0].as_bit().unwrap();
                Action::Query(Key::input(if selector { 2 } else { 1 }))
            }
            _ => {
                let bit = response.unwrap()[0].as_bit().unwrap();
                Action::Finish(vec![(Key::answer(), Value::scalar(bit as u64))])
            }
        }
    }
}

#[test]
fn extracts_an_adaptive_selector_within_a_small_degree_bound() {
    // Five input bits but capacity 2: the extracted polynomial must fit in
    // degree S^{2R} = 4 < 5, and it does — selection reads only two bits.
    let algo = TestAlgo {
        n: 5,
        rounds: 1,
        make: Box::new(|_| vec![RosterEntry::new(0, AddressProgram { state: 0 })]),
    };
    let extraction = extract_polynomial(&algo, 2, &ExtractOptions::default()).unwrap();
    let expected = poly(5, &[(0b00010, 1), (0b00011, -1), (0b00101, 1)]);
    assert_eq!(extraction.polynomial, expected);
    assert_eq!(extraction.degree, 2);
    assert_eq!(extraction.degree_bound, 4);
    assert!(extraction.audits_ok());
    // Three realized sequences: x_0=0 branches on x_1, x_0=1 on x_2.
    assert_eq!(extraction.index.sequence_class_counts, vec![((1, 0), 4)]);
}

/// Two writers deposit stamped flags under a shared key; a second-round
/// reader answers whether both flags arrived. Exercises the attribution
/// sum over several writers and the strict-superset subtraction.
fn stamped_tally_algorithm(stamped: bool) -> TestAlgo {
    let tally = Key::new("t", &[]);
    TestAlgo {
        n: 2,
        rounds: 2,
        make: Box::new(move |round| {
            if round == 1 {
                (0..2u64)
                    .map(|i| {
                        RosterEntry::new(
                            i,
                            NonAdaptive::new(vec![Key::input(i as usize)], move |responses| {
                                if responses[0][0].as_bit() == Some(true) {
                                    let value = if stamped {
                                        Value::pair(i, 1)
                                    } else {
                                        Value::scalar(1)
                                    };
                                    vec![(tally, value)]
                                } else {
                                    Vec::new()
                                }
                            }),
                        )
                    })
                    .collect()
            } else {
                vec![RosterEntry::new(
                    9,
                    NonAdaptive::new(vec![tally], |responses| {
                        let both = responses[0].len() == 2;
                        vec![(Key::answer(), Value::scalar(both as u64))]
                    }),
                )]
            }
        }),
    }
}

#[test]
fn extracts_across_rounds_with_stamped_writes() {
    let extraction =
        extract_polynomial(&stamped_tally_algorithm(true), 4, &ExtractOptions::default())
            .unwrap();
    assert_eq!(extraction.polynomial, interpolate(2, |m| m == 0b11).unwrap());
    assert!(extraction.audits_ok());
    // The tally key realized three nonempty multisets: each flag alone and
    // both together.
    let tally_multisets = extraction
        .index
        .written_multisets
        .iter()
        .find(|((round, key), _)| *round == 1 && *key == Key::new("t", &[]))
        .map(|(_, multisets)| multisets.len())
        .unwrap();
    assert_eq!(tally_multisets, 3);
}

#[test]
fn identical_unstamped_writes_are_rejected_as_ambiguous() {
    let err = extract_polynomial(&stamped_tally_algorithm(false), 4, &ExtractOptions::default())
        .unwrap_err();
    match err {
        Error::AmbiguousSourcing { round, key, .. } => {
            assert_eq!(round, 1);
            assert_eq!(key, "t()");
        }
        other => panic!("expected ambiguous sourcing, got {other}"),
    }
}

#[test]
fn extraction_guard_is_adjustable_up_to_the_dense_limit() {
    let algo = TestAlgo {
        n: 13,
        rounds: 1,
        make: Box::new(|_| {
            vec![RosterEntry::new(
                0,
                NonAdaptive::new(vec![Key::input(0)], |responses| {
                    vec![(Key::answer(), responses[0][0])]
                }),
            )]
        }),
    };
    assert!(matches!(
        extract_polynomial(&algo, 2, &ExtractOptions::default()),
        Err(Error::InvalidArgument(_))
    ));
    let extraction = extract_polynomial(
        &algo,
        2,
        &ExtractOptions {
            max_vars: 15,
            ..ExtractOptions::default()
        },
    )
    .unwrap();
    assert_eq!(extraction.polynomial, poly(13, &[(1, 1)]));
}

// -------------------------------------------------------------------
// Mixtures
// -------------------------------------------------------------------

#[test]
fn singleton_mixture_of_a_correct_polynomial_has_no_error() {
    let f = promise_majority(3).unwrap();
    let p = interpolate(3, |m| m.count_ones() >= 2).unwrap();
    let report = mixture_check(&f, &[(BigRational::one(), p.clone())]).unwrap();
    assert!(report.max_promise_error.is_zero());
    assert!(report.worst_promise_point.is_none());
    assert_eq!(report.degree, p.degree());
    assert!(report.meets(&r(1, 3)));
    // Off the promise (000 and 111) the majority polynomial is still 0/1.
    assert_eq!(report.max_off_promise_deviation, Some(BigRational::zero()));
}

#[test]
fn averaging_two_correct_polynomials_stays_correct() {
    let f = promise_majority(3).unwrap();
    let p = interpolate(3, |m| m.count_ones() >= 2).unwrap();
    let report =
        mixture_check(&f, &[(r(1, 2), p.clone()), (r(1, 2), p.clone())]).unwrap();
    assert!(report.max_promise_error.is_zero());
    assert!(report.degree <= p.degree());
}

#[test]
fn mixture_error_boundary_is_inclusive() {
    let f = promise_majority(3).unwrap();
    let correct = interpolate(3, |m| m.count_ones() >= 2).unwrap();
    let anti = MultilinearPolynomial::constant(3, BigRational::one()).sub(&correct);
    let report =
        mixture_check(&f, &[(r(2, 3), correct.clone()), (r(1, 3), anti.clone())]).unwrap();
    assert_eq!(report.max_promise_error, r(1, 3));
    assert!(report.meets(&r(1, 3)));
    assert!(report.worst_promise_point.is_some());

    let report = mixture_check(&f, &[(r(3, 5), correct), (r(2, 5), anti)]).unwrap();
    assert_eq!(report.max_promise_error, r(2, 5));
    assert!(!report.meets(&r(1, 3)));
}

#[test]
fn mixture_weights_are_validated() {
    let f = promise_majority(3).unwrap();
    let p = interpolate(3, |m| m.count_ones() >= 2).unwrap();
    assert!(mixture_check(&f, &[(r(1, 2), p.clone())]).is_err());
    assert!(mixture_check(&f, &[(r(-1, 2), p.clone()), (r(3, 2), p.clone())]).is_err());
    assert!(mixture_check(&f, &[]).is_err());
}
