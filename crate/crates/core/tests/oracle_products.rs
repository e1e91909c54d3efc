//! The ten operator products that meet at `z^(n-1)` when `f_{-2}` is read off,
//! evaluated exactly and by quadrature at `n = 5`.

use std::collections::BTreeMap;

use htoeplitz::derive::{constraint_at_offset, side_for_degree, solve_telescoping};
use htoeplitz::oracle::{apply_numeric, compare, random_bindings, QuadratureConfig};
use htoeplitz::toeplitz::apply_quasi;
use htoeplitz::{BasisVector, HarmonicVector, RadialFunction, Symbol};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type Factor = (i64, RadialFunction);

fn exact(ops: &[&Factor], v: BasisVector) -> HarmonicVector {
    let mut current = HarmonicVector::basis(v);
    for (k, phi) in ops.iter().rev() {
        let mut next = HarmonicVector::zero();
        for (w, c) in current.entries() {
            next = &next + &apply_quasi(*k, phi, *w).unwrap().scale(c);
        }
        current = next;
    }
    current
}

fn numeric(ops: &[&Factor], v: BasisVector, bindings: &BTreeMap<htoeplitz::Indeterminate, Complex64>) -> BTreeMap<BasisVector, Complex64> {
    let cfg = QuadratureConfig::default();
    let mut current = BTreeMap::from([(v, Complex64::new(1.0, 0.0))]);
    for (k, phi) in ops.iter().rev() {
        let mut next: BTreeMap<BasisVector, Complex64> = BTreeMap::new();
        for (w, c) in &current {
            for (x, d) in apply_numeric(*k, phi, *w, bindings, &cfg).unwrap() {
                *next.entry(x).or_default() += c * d;
            }
        }
        current = next;
    }
    current
}

#[test]
fn ten_products_agree_at_n5() {
    let u = Symbol::u(4);
    let mut f = Symbol::zero();
    for k in (-2..=3).rev() {
        let eq = constraint_at_offset(&u, &f, k, side_for_degree(k)).unwrap();
        f.add_component(k, solve_telescoping(&eq).unwrap().1);
    }
    let mut vars = f.indeterminates();
    vars.extend(u.indeterminates());
    vars.sort();
    vars.dedup();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let v = BasisVector::analytic(5);
    let target = BasisVector::analytic(4);
    let pairs = [(-2, 1), (0, -1), (1, -2), (2, -3), (3, -4)];
    for trial in 0..3 {
        let bindings = random_bindings(&mut rng, &vars);
        for (j, m) in pairs {
            let fj = (j, f.get(j));
            let um = (m, u.get(m));
            for ops in [[&fj, &um], [&um, &fj]] {
                let sym = exact(&ops, v);
                assert!(sym.entries().all(|(w, _)| *w == target));
                let num = numeric(&ops, v, &bindings);
                let rep = compare(&sym, &num, &bindings, 1e-9).unwrap();
                assert!(rep.pass, "trial {trial}, f{j} with u{m}: {rep:?}");
            }
        }
    }
}
