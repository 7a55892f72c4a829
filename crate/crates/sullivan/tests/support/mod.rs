//! Seeded randomized suites shared by the property and acceptance tests,
//! plus the determinant-minor oracle for invariant factors.

use itertools::Itertools;
use num::{Integer, One, Signed, Zero};
use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sullivan::algebra::{BasisFilter, Polynomial};
use sullivan::bigraded::{build, BigradedModel, CohomologySpec};
use sullivan::groups::{GroupPresentation, Word};
use sullivan::linalg::{kernel_basis, rref, smith_normal_form, solve, QMatrix, ZMatrix};
use sullivan::{q, q_ratio, Q, Z};

fn wedge_model() -> BigradedModel {
    build(&CohomologySpec::wedge_s2_s3_s3(), 8)
}

/// A random homogeneous polynomial of the given degree: up to three basis
/// monomials with small rational coefficients.
fn random_homogeneous(model: &BigradedModel, rng: &mut ChaCha8Rng, degree: u32) -> Polynomial {
    let basis = sullivan::algebra::basis_of(model.ctx(), degree, BasisFilter::any());
    let mut p = Polynomial::zero();
    if basis.is_empty() {
        return p;
    }
    for _ in 0..rng.random_range(1..=3) {
        let m = basis[rng.random_range(0..basis.len())].clone();
        p.add_term(m, q_ratio(rng.random_range(-4..=4), rng.random_range(1..=3)));
    }
    p
}

/// `d(uv) = du v + (-1)^{|u|} u dv` on random homogeneous inputs, with
/// degrees kept low enough that nothing leaves the cap window.
pub fn leibniz_suite(seed: u64, cases: usize) {
    let model = wedge_model();
    let cdga = model.model();
    let ctx = model.ctx();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for case in 0..cases {
        let p = rng.random_range(2..=5);
        let q_deg = rng.random_range(2..=(7 - p).max(2));
        let u = random_homogeneous(&model, &mut rng, p);
        let v = random_homogeneous(&model, &mut rng, q_deg);
        let duv = cdga.apply_d(&u.mul(&v, ctx));
        assert!(!duv.overflowed, "case {case} left the window");
        let du = cdga.apply_d(&u).value;
        let dv = cdga.apply_d(&v).value;
        let sign = q(if p % 2 == 0 { 1 } else { -1 });
        let expected = du.mul(&v, ctx).add(&u.mul(&dv, ctx).scale(&sign));
        assert_eq!(duv.value, expected, "case {case}: Leibniz failure");
    }
}

/// Graded commutativity `uv = (-1)^{|u||v|} vu` and associativity
/// `(uv)w = u(vw)` on random homogeneous inputs.
pub fn graded_algebra_suite(seed: u64, cases: usize) {
    let model = wedge_model();
    let ctx = model.ctx();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for case in 0..cases {
        let p = rng.random_range(2..=6);
        let q_deg = rng.random_range(2..=6);
        let u = random_homogeneous(&model, &mut rng, p);
        let v = random_homogeneous(&model, &mut rng, q_deg);
        let sign = q(if (p * q_deg) % 2 == 0 { 1 } else { -1 });
        assert_eq!(
            u.mul(&v, ctx),
            v.mul(&u, ctx).scale(&sign),
            "case {case}: commutativity failure"
        );
        let w_deg = rng.random_range(2..=4);
        let w = random_homogeneous(&model, &mut rng, w_deg);
        assert_eq!(
            u.mul(&v, ctx).mul(&w, ctx),
            u.mul(&v.mul(&w, ctx), ctx),
            "case {case}: associativity failure"
        );
    }
}

fn random_qmatrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> QMatrix {
    let mut m = QMatrix::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            m.set(i, j, q_ratio(rng.random_range(-5..=5), rng.random_range(1..=3)));
        }
    }
    m
}

/// Rank plus kernel dimension equals the column count; kernel vectors
/// annihilate; `solve` recovers a preimage of any vector in the image.
pub fn rank_nullity_suite(seed: u64, cases: usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for case in 0..cases {
        let rows = rng.random_range(1..=6);
        let cols = rng.random_range(1..=6);
        let m = random_qmatrix(&mut rng, rows, cols);
        let rank = rref(&m).rank;
        let kernel = kernel_basis(&m);
        assert_eq!(rank + kernel.len(), cols, "case {case}: rank-nullity failure");
        for k in &kernel {
            assert!(
                m.mul_vec(k).iter().all(Q::is_zero),
                "case {case}: kernel vector not annihilated"
            );
        }
        let x: Vec<Q> = (0..cols)
            .map(|_| q_ratio(rng.random_range(-3..=3), rng.random_range(1..=2)))
            .collect();
        let b = m.mul_vec(&x);
        let sol = solve(&m, &b).expect("image vector must be solvable");
        assert_eq!(m.mul_vec(&sol), b, "case {case}: solve failure");
    }
}

fn laplace_det(m: &[Vec<Z>]) -> Z {
    let n = m.len();
    if n == 0 {
        return Z::one();
    }
    if n == 1 {
        return m[0][0].clone();
    }
    let mut acc = Z::zero();
    for (j, entry) in m[0].iter().enumerate() {
        if entry.is_zero() {
            continue;
        }
        let minor: Vec<Vec<Z>> = m[1..]
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|&(k, _)| k != j)
                    .map(|(_, v)| v.clone())
                    .collect()
            })
            .collect();
        let term = entry * laplace_det(&minor);
        if j % 2 == 0 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    acc
}

/// Invariant factors read off determinant minors: the product of the first
/// `k` factors is the gcd of all `k x k` minors. All-zero rows are dropped
/// first; they only contribute zero minors, which never change a gcd.
pub fn minor_gcd_invariants(m: &ZMatrix) -> Vec<Z> {
    let rows: Vec<Vec<Z>> = (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| m.at(i, j).clone()).collect::<Vec<Z>>())
        .filter(|row| row.iter().any(|v| !v.is_zero()))
        .collect();
    let n = rows.len().min(m.cols());
    let mut out = Vec::new();
    let mut prev = Z::one();
    for k in 1..=n {
        let mut g = Z::zero();
        for rs in (0..rows.len()).combinations(k) {
            for cs in (0..m.cols()).combinations(k) {
                let sub: Vec<Vec<Z>> = rs
                    .iter()
                    .map(|&i| cs.iter().map(|&j| rows[i][j].clone()).collect())
                    .collect();
                g = g.gcd(&laplace_det(&sub));
            }
        }
        if g.is_zero() {
            break;
        }
        out.push(&g / &prev);
        prev = g;
    }
    out
}

/// The Smith normal form agrees with the minor-gcd oracle, its diagonal is
/// positive with a divisibility chain, and the recorded transforms
/// reconstruct the diagonal exactly.
pub fn snf_divisibility_suite(seed: u64, cases: usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for case in 0..cases {
        let rows = rng.random_range(1..=5);
        let cols = rng.random_range(1..=5);
        let mut m = ZMatrix::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.set(i, j, Z::from(rng.random_range(-9..=9)));
            }
        }
        let snf = smith_normal_form(&m, true);
        assert_eq!(snf.rank, snf.diagonal.len());
        for d in &snf.diagonal {
            assert!(d.is_positive(), "case {case}: nonpositive invariant factor");
        }
        for pair in snf.diagonal.windows(2) {
            assert!(
                (&pair[1] % &pair[0]).is_zero(),
                "case {case}: divisibility chain broken"
            );
        }
        assert_eq!(
            snf.diagonal,
            minor_gcd_invariants(&m),
            "case {case}: disagrees with the minor oracle"
        );
        let d = snf.left.unwrap().mul(&m).mul(&snf.right.unwrap());
        for i in 0..d.rows() {
            for j in 0..d.cols() {
                let expect = if i == j && i < snf.diagonal.len() {
                    snf.diagonal[i].clone()
                } else {
                    Z::zero()
                };
                assert_eq!(d.at(i, j), &expect, "case {case}: transform mismatch");
            }
        }
    }
}

fn random_word(rng: &mut ChaCha8Rng, ngens: usize) -> Word {
    let mut w = Word::identity();
    for _ in 0..rng.random_range(0..=5) {
        let exp = *[-2, -1, 1, 2].choose(rng).unwrap();
        w.push(rng.random_range(0..ngens), exp);
    }
    w
}

/// Abelian invariants are unchanged by relator reordering, inversion,
/// conjugation, and appending a consequence relator.
pub fn tietze_suite(seed: u64, cases: usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for case in 0..cases {
        let ngens = rng.random_range(1..=4);
        let names: Vec<String> = (0..ngens).map(|i| format!("g{i}")).collect();
        let nrel = rng.random_range(0..=5);
        let relators: Vec<Word> = (0..nrel).map(|_| random_word(&mut rng, ngens)).collect();
        let base = GroupPresentation::new(names.clone(), relators.clone());
        let invariants = base.abelian_invariants();

        let mut shuffled = relators.clone();
        shuffled.shuffle(&mut rng);
        assert_eq!(
            GroupPresentation::new(names.clone(), shuffled).abelian_invariants(),
            invariants,
            "case {case}: reordering changed the invariants"
        );

        if !relators.is_empty() {
            let i = rng.random_range(0..relators.len());

            let mut inverted = relators.clone();
            inverted[i] = inverted[i].inverse();
            assert_eq!(
                GroupPresentation::new(names.clone(), inverted).abelian_invariants(),
                invariants,
                "case {case}: inversion changed the invariants"
            );

            let w = random_word(&mut rng, ngens);
            let mut conjugated = relators.clone();
            conjugated[i] = w.concat(&conjugated[i]).concat(&w.inverse());
            assert_eq!(
                GroupPresentation::new(names.clone(), conjugated).abelian_invariants(),
                invariants,
                "case {case}: conjugation changed the invariants"
            );

            let j = rng.random_range(0..relators.len());
            let mut extended = relators.clone();
            let consequence = relators[i].concat(&relators[j]);
            extended.push(consequence);
            assert_eq!(
                GroupPresentation::new(names.clone(), extended).abelian_invariants(),
                invariants,
                "case {case}: consequence relator changed the invariants"
            );
        }
    }
}
