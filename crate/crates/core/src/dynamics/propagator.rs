use super::Lindbladian;
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, I, ZERO};

/// Partition of basis indices into components that `H` and `L` never
/// connect. Components are listed in order of their smallest index.
pub(crate) fn components(lind: &Lindbladian) -> Vec<Vec<usize>> {
    let n = lind.dim();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..n {
        for j in 0..n {
            if lind.hamiltonian.get(i, j) != ZERO || lind.collapse.get(i, j) != ZERO {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; n];
    for i in 0..n {
        let root = find(&mut parent, i);
        if slot[root] == usize::MAX {
            slot[root] = groups.len();
            groups.push(Vec::new());
        }
        groups[slot[root]].push(i);
    }
    groups
}

#[derive(Clone, Debug)]
struct Block {
    rows: Vec<usize>,
    cols: Vec<usize>,
    /// `exp(G dt)` acting on the row-major vectorization of the block.
    step: ComplexMatrix,
    diagonal: bool,
}

/// Exact propagator `rho(t) -> rho(t + dt)` restricted to the blocks of
/// `rho` that are occupied initially. Blocks between disconnected
/// components evolve independently, and empty blocks stay empty.
#[derive(Clone, Debug)]
pub struct SectorPropagator {
    dim: usize,
    dt: f64,
    blocks: Vec<Block>,
}

impl SectorPropagator {
    pub fn new(lind: &Lindbladian, rho0: &ComplexMatrix, dt: f64) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::Params(format!("propagator step must be positive, got {dt}")));
        }
        let comps = components(lind);
        let k = lind.effective();
        let l = &lind.collapse;
        let mut blocks = Vec::new();
        for (a, rows) in comps.iter().enumerate() {
            for (b, cols) in comps.iter().enumerate().skip(a) {
                let occupied = rows.iter().any(|&i| cols.iter().any(|&j| rho0.get(i, j) != ZERO));
                if !occupied {
                    continue;
                }
                let generator = block_generator(&k.select(rows, rows), &k.select(cols, cols), &l.select(rows, rows), &l.select(cols, cols));
                let step = generator.scale_real(dt).expm_pade();
                if !step.is_finite() {
                    return Err(Error::Integration { t: 0.0, reason: "non-finite block propagator".into() });
                }
                blocks.push(Block { rows: rows.clone(), cols: cols.clone(), step, diagonal: a == b });
            }
        }
        Ok(Self { dim: lind.dim(), dt, blocks })
    }

    pub fn step(&self) -> f64 {
        self.dt
    }

    /// Largest superoperator dimension among the occupied blocks.
    pub fn largest_block(&self) -> usize {
        self.blocks.iter().map(|b| b.step.rows()).max().unwrap_or(0)
    }

    /// Advance `rho` by one step.
    pub fn apply(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(rho.rows(), self.dim, "propagator applied to wrong dimension");
        let mut out = ComplexMatrix::zeros(self.dim, self.dim);
        for b in &self.blocks {
            let n = b.cols.len();
            let vec: Vec<_> = b.rows.iter().flat_map(|&i| b.cols.iter().map(move |&j| rho.get(i, j))).collect();
            let next = &b.step * &ComplexMatrix::column(&vec);
            for (p, &i) in b.rows.iter().enumerate() {
                for (q, &j) in b.cols.iter().enumerate() {
                    let v = next.get(p * n + q, 0);
                    out.set(i, j, v);
                    if !b.diagonal {
                        out.set(j, i, v.conj());
                    }
                }
            }
        }
        if self.blocks.iter().any(|b| b.diagonal) {
            // restore exact Hermiticity on the diagonal blocks
            out = out.hermitian_part();
        }
        out
    }

    /// Replace the step by its square, doubling `dt`.
    pub fn square(&mut self) {
        for b in &mut self.blocks {
            b.step = &b.step * &b.step;
        }
        self.dt *= 2.0;
    }
}

/// Generator of `X -> -i(K_a X - X K_b^dagger) + L_a X L_b^dagger` on the
/// row-major vectorization of an `m x n` block, using
/// `vec(A X B) = (A kron B^T) vec(X)`.
fn block_generator(k_a: &ComplexMatrix, k_b: &ComplexMatrix, l_a: &ComplexMatrix, l_b: &ComplexMatrix) -> ComplexMatrix {
    let (m, n) = (k_a.rows(), k_b.rows());
    let left = k_a.kron(&ComplexMatrix::identity(n)).scale(-I);
    let right = ComplexMatrix::identity(m).kron(&k_b.conj()).scale(I);
    let jump = l_a.kron(&l_b.conj());
    &(&left + &right) + &jump
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{basis_state, FockCutoff};
    use crate::linalg::re;
    use crate::model::{build_four_qubit, build_two_qubit, ModelParams};

    #[test]
    fn two_qubit_components_follow_excitation_number() {
        let p = ModelParams { cutoff: FockCutoff(2), ..ModelParams::two_qubit_baseline() };
        let sys = build_two_qubit(&p).unwrap();
        let lind = Lindbladian::new(&sys.hamiltonian, &sys.collapse).unwrap();
        let comps = components(&lind);
        // |up up>, {|up down>, |down up>}, |down down>, each times the cavity
        let sizes: Vec<usize> = comps.iter().map(Vec::len).collect();
        assert_eq!(sizes, vec![3, 6, 3]);
    }

    #[test]
    fn four_qubit_branches_split() {
        let sys = build_four_qubit(&ModelParams { cutoff: FockCutoff(2), ..ModelParams::four_qubit_baseline() }).unwrap();
        let lind = Lindbladian::new(&sys.hamiltonian, &sys.collapse).unwrap();
        let comps = components(&lind);
        let l = &sys.layout;
        let a = l.index_of(&[0, 1, 1, 1, 0]).unwrap();
        let b = l.index_of(&[1, 1, 0, 1, 0]).unwrap();
        let find = |i: usize| comps.iter().position(|c| c.contains(&i)).unwrap();
        assert_ne!(find(a), find(b));
        assert_eq!(comps[find(a)].len(), 2 * 3);
    }

    #[test]
    fn block_propagation_matches_direct_rhs_for_small_step() {
        let p = ModelParams { cutoff: FockCutoff(2), ..ModelParams::two_qubit_baseline() };
        let sys = build_two_qubit(&p).unwrap();
        let lind = Lindbladian::new(&sys.hamiltonian, &sys.collapse).unwrap();
        let s = re(std::f64::consts::FRAC_1_SQRT_2);
        // coherent superposition across two components
        let psi = &basis_state(&sys.layout, &[0, 1, 0]).unwrap().scale(s) + &basis_state(&sys.layout, &[1, 1, 0]).unwrap().scale(s);
        let rho = ComplexMatrix::projector(&psi);
        let dt = 1e-6;
        let prop = SectorPropagator::new(&lind, &rho, dt).unwrap();
        let next = prop.apply(&rho);
        let finite_diff = (&next - &rho).scale_real(1.0 / dt);
        let rhs = lind.apply(&rho);
        assert!(finite_diff.max_abs_diff(&rhs) < 1e-3 * rhs.max_abs());
    }

    #[test]
    fn squaring_doubles_step() {
        let p = ModelParams { cutoff: FockCutoff(2), ..ModelParams::two_qubit_baseline() };
        let sys = build_two_qubit(&p).unwrap();
        let lind = Lindbladian::new(&sys.hamiltonian, &sys.collapse).unwrap();
        let rho = ComplexMatrix::projector(&basis_state(&sys.layout, &[0, 1, 0]).unwrap());
        let mut twice = SectorPropagator::new(&lind, &rho, 0.1).unwrap();
        let once = twice.apply(&twice.apply(&rho));
        twice.square();
        assert_eq!(twice.step(), 0.2);
        assert!(twice.apply(&rho).max_abs_diff(&once) < 1e-13);
    }

    #[test]
    fn rejects_bad_step() {
        let sys = build_two_qubit(&ModelParams { cutoff: FockCutoff(1), ..ModelParams::two_qubit_baseline() }).unwrap();
        let lind = Lindbladian::new(&sys.hamiltonian, &sys.collapse).unwrap();
        let rho = ComplexMatrix::identity(8).scale_real(0.125);
        assert!(SectorPropagator::new(&lind, &rho, 0.0).is_err());
        assert!(SectorPropagator::new(&lind, &rho, f64::NAN).is_err());
    }
}
