use super::structure::{ProcessMatrix, ProcessStructure, SlotSpec};
use crate::channels::{unitary_channel, DensityState, KrausChannel};
use crate::error::{Error, Result};
use crate::tensor::{exp_hermitian, kron, pauli, ComplexMatrix, Subsystem, C64};

/// One step of a comb.
#[derive(Debug, Clone, PartialEq)]
pub enum CombStep {
    /// Fixed channel on `system ⊗ environment`.
    Fixed(KrausChannel),
    /// Caller-supplied channel on the system, identity on the environment.
    Slot(String),
}

/// Channels interleaved with slots, with an environment threading through.
///
/// With an environment the past is `S_I Q_I` and the future `S_O Q_O`
/// (system first); without one they are `P` and `F`.
#[derive(Debug, Clone, PartialEq)]
pub struct CombRecipe {
    system_dim: usize,
    env_dim: usize,
    steps: Vec<CombStep>,
    structure: ProcessStructure,
}

impl CombRecipe {
    pub fn new(system_dim: usize, env_dim: Option<usize>, steps: Vec<CombStep>) -> Result<Self> {
        let env = env_dim.unwrap_or(1);
        if system_dim == 0 || env == 0 {
            return Err(Error::DimensionMismatch("comb dimensions must be at least 1".into()));
        }
        let joint = system_dim * env;
        let mut slots = Vec::new();
        for (i, step) in steps.iter().enumerate() {
            match step {
                CombStep::Fixed(k) => {
                    if k.din() != joint || k.dout() != joint {
                        return Err(Error::DimensionMismatch(format!(
                            "step {i}: {}→{} channel in a comb over dimension {joint}",
                            k.din(),
                            k.dout()
                        )));
                    }
                }
                CombStep::Slot(label) => slots.push(SlotSpec::uniform(label, system_dim)),
            }
        }
        let (past, future) = match env_dim {
            Some(e) => (
                vec![Subsystem::new("S_I", system_dim), Subsystem::new("Q_I", e)],
                vec![Subsystem::new("S_O", system_dim), Subsystem::new("Q_O", e)],
            ),
            None => (
                vec![Subsystem::new("P", system_dim)],
                vec![Subsystem::new("F", system_dim)],
            ),
        };
        let structure = ProcessStructure::new(past, slots, future)?;
        Ok(Self {
            system_dim,
            env_dim: env,
            steps,
            structure,
        })
    }

    pub fn steps(&self) -> &[CombStep] {
        &self.steps
    }

    pub fn structure(&self) -> &ProcessStructure {
        &self.structure
    }

    pub fn system_dim(&self) -> usize {
        self.system_dim
    }

    pub fn env_dim(&self) -> usize {
        self.env_dim
    }

    fn slot_position(&self, label: &str) -> usize {
        self.structure
            .slots()
            .iter()
            .position(|s| s.label == label)
            .expect("slot registered on construction")
    }
}

/// `H = −σx⊗σx − (𝟙⊗σz + σz⊗𝟙)`.
pub fn ising_hamiltonian() -> ComplexMatrix {
    let (x, z, id) = (pauli::x(), pauli::z(), ComplexMatrix::identity(2));
    let xx = kron(&x, &x);
    let field = &kron(&id, &z) + &kron(&z, &id);
    (&xx + &field).scale_real(-1.0)
}

/// `U = exp(−iH)` for the Ising Hamiltonian at unit time.
pub fn ising_unitary() -> ComplexMatrix {
    exp_hermitian(&ising_hamiltonian(), C64::new(0.0, -1.0)).expect("Hermitian by construction")
}

fn ising_recipe(labels: &[&str]) -> CombRecipe {
    let u = CombStep::Fixed(unitary_channel(&ising_unitary()).expect("unitary"));
    let mut steps = vec![u.clone()];
    for l in labels {
        steps.push(CombStep::Slot(l.to_string()));
        steps.push(u.clone());
    }
    CombRecipe::new(2, Some(2), steps).expect("qubit comb")
}

/// `U, A, U, B, U` on target ⊗ ancilla.
pub fn comb_ising2() -> CombRecipe {
    ising_recipe(&["A", "B"])
}

/// `U, A, U, B, U, C, U` on target ⊗ ancilla.
pub fn comb_ising3() -> CombRecipe {
    ising_recipe(&["A", "B", "C"])
}

/// Slots applied one after the other with nothing in between.
pub fn comb_markov(order: &[&str], dim: usize) -> Result<CombRecipe> {
    CombRecipe::new(dim, None, order.iter().map(|l| CombStep::Slot(l.to_string())).collect())
}

/// Runs the recipe on an arbitrary operator, with slot `k` acting as
/// `Y ↦ Σ_j L_kj Y R_kj` on `system ⊗ environment`.
fn run_linear(
    recipe: &CombRecipe,
    input: ComplexMatrix,
    slot_map: &dyn Fn(usize, &ComplexMatrix) -> Result<ComplexMatrix>,
) -> Result<ComplexMatrix> {
    let mut y = input;
    for step in &recipe.steps {
        y = match step {
            CombStep::Fixed(k) => k.apply_operator(&y)?,
            CombStep::Slot(l) => slot_map(recipe.slot_position(l), &y)?,
        };
    }
    Ok(y)
}

/// Sequential application: channels are matched to slots in label order.
pub fn apply_comb(
    recipe: &CombRecipe,
    channels: &[KrausChannel],
    input: &DensityState,
) -> Result<DensityState> {
    let slots = recipe.structure.slots();
    if channels.len() != slots.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} channels for {} slots",
            channels.len(),
            slots.len()
        )));
    }
    let joint = recipe.system_dim * recipe.env_dim;
    if input.dim() != joint {
        return Err(Error::DimensionMismatch(format!(
            "input of dimension {} into a comb over dimension {joint}",
            input.dim()
        )));
    }
    let extended = channels
        .iter()
        .map(|c| {
            if c.din() != recipe.system_dim || c.dout() != recipe.system_dim {
                return Err(Error::DimensionMismatch(format!(
                    "{}→{} channel in a slot of dimension {}",
                    c.din(),
                    c.dout(),
                    recipe.system_dim
                )));
            }
            Ok(c.extend_with_identity(recipe.env_dim))
        })
        .collect::<Result<Vec<_>>>()?;
    let out = run_linear(recipe, input.matrix().clone(), &|k, y| {
        extended[k].apply_operator(y)
    })?;
    DensityState::new(out, recipe.structure.future_layout())
}

/// Process matrix of the comb, obtained by feeding matrix units through every
/// slot and every past input: `W[(p,s',f),(p',s,f')] = O(p,p',s',s)[f,f']`.
pub fn comb_to_process_matrix(recipe: &CombRecipe) -> Result<ProcessMatrix> {
    let st = recipe.structure.clone();
    let (dp, ds, df) = (st.past_dim(), st.slot_dim(), st.future_dim());
    let d = recipe.system_dim;
    let env = ComplexMatrix::identity(recipe.env_dim);
    let n_slots = st.slots().len();
    // Slot with Choi |i'o'⟩⟨io| acts as Y ↦ (|o'⟩⟨i'| ⊗ 𝟙) Y (|i⟩⟨o| ⊗ 1).
    let left: Vec<ComplexMatrix> = (0..d * d)
        .map(|a| {
            let (i, o) = (a / d, a % d);
            kron(&ComplexMatrix::unit(d, o, i), &env)
        })
        .collect();
    let right: Vec<ComplexMatrix> = left.iter().map(ComplexMatrix::adjoint).collect();
    let n = st.dim();
    let mut w = ComplexMatrix::zeros(n, n);
    let mut sp_digits = vec![0usize; n_slots];
    let mut s_digits = vec![0usize; n_slots];
    for sp in 0..ds {
        split_digits(sp, d * d, &mut sp_digits);
        for s in 0..ds {
            split_digits(s, d * d, &mut s_digits);
            for p in 0..dp {
                for pp in 0..dp {
                    let o = run_linear(recipe, ComplexMatrix::unit(dp, p, pp), &|k, y| {
                        Ok(left[sp_digits[k]]
                            .matmul_unchecked(y)
                            .matmul_unchecked(&right[s_digits[k]]))
                    })?;
                    for f in 0..df {
                        for fp in 0..df {
                            w[(st.index(p, sp, f), st.index(pp, s, fp))] = o[(f, fp)];
                        }
                    }
                }
            }
        }
    }
    ProcessMatrix::new(st, w)
}

fn split_digits(mut x: usize, radix: usize, out: &mut [usize]) {
    for d in out.iter_mut().rev() {
        *d = x % radix;
        x /= radix;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{gad, is_cptp, kraus_to_choi, phase_flip, random_channel};
    use crate::processes::contraction::apply_process_matrix;
    use crate::processes::vectors::{w_compose, CausalOrder};
    use crate::tensor::random::random_density;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn ising_unitary_is_unitary() {
        assert!(ising_unitary().unitarity_defect() < 1e-10);
        assert!(ising_hamiltonian().is_hermitian(1e-15));
    }

    #[test]
    fn identity_slots_give_u_cubed() {
        let w = comb_to_process_matrix(&comb_ising2()).unwrap();
        let id = kraus_to_choi(&KrausChannel::identity(2));
        let out = apply_process_matrix(&w, &[id.clone(), id]).unwrap();
        let u = ising_unitary();
        let u3 = u.matmul(&u).unwrap().matmul(&u).unwrap();
        let expected = kraus_to_choi(&unitary_channel(&u3).unwrap());
        assert!(out.matrix().max_abs_diff(expected.matrix()) < 1e-10);
    }

    #[test]
    fn process_matrix_agrees_with_sequential_application() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let recipe = comb_ising2();
        let w = comb_to_process_matrix(&recipe).unwrap();
        for _ in 0..10 {
            let ks = [random_channel(&mut rng, 2, 2), random_channel(&mut rng, 2, 2)];
            let rho = DensityState::from_matrix(random_density(&mut rng, 4)).unwrap();
            let direct = apply_comb(&recipe, &ks, &rho).unwrap();
            let j = apply_process_matrix(&w, &[kraus_to_choi(&ks[0]), kraus_to_choi(&ks[1])]).unwrap();
            let via = j.apply_operator(rho.matrix()).unwrap();
            assert!(via.max_abs_diff(direct.matrix()) < 1e-9);
        }
    }

    #[test]
    fn markov_recipe_reproduces_composition() {
        let w = comb_to_process_matrix(&comb_markov(&["A", "B"], 2).unwrap()).unwrap();
        let expected = w_compose(CausalOrder::AThenB, 2).unwrap().to_matrix();
        assert!(w.matrix().max_abs_diff(expected.matrix()) < 1e-12);
        assert_eq!(w.structure(), expected.structure());
    }

    #[test]
    fn ising_outputs_are_cptp_on_grid() {
        let w = comb_to_process_matrix(&comb_ising2()).unwrap();
        for p in [0.0, 0.4, 1.0] {
            for q in [0.0, 0.5, 1.0] {
                let ch = [kraus_to_choi(&gad(p, 1.0).unwrap()), kraus_to_choi(&phase_flip(q).unwrap())];
                let out = apply_process_matrix(&w, &ch).unwrap();
                assert!(is_cptp(&out).cptp);
            }
        }
    }

    #[test]
    fn tripartite_recipe_shape() {
        let r = comb_ising3();
        assert_eq!(r.steps().len(), 7);
        assert_eq!(r.structure().slot_dim(), 64);
    }

    #[test]
    fn mismatched_dimensions() {
        let bad = CombRecipe::new(2, Some(2), vec![CombStep::Fixed(KrausChannel::identity(2))]);
        assert!(matches!(bad, Err(Error::DimensionMismatch(_))));
        let r = comb_ising2();
        let rho = DensityState::maximally_mixed(2);
        let ks = [KrausChannel::identity(2), KrausChannel::identity(2)];
        assert!(apply_comb(&r, &ks, &rho).is_err());
    }
}
