use super::structure::{Process, ProcessMatrix, ProcessStructure, ProcessVector};
use crate::channels::ChoiOperator;
use crate::error::{Error, Result};
use crate::tensor::{herm_eig_unchecked, ComplexMatrix, C64, ZERO};

/// Eigenvalues below this magnitude are dropped in the pure fast path.
const SPECTRAL_CUTOFF: f64 = 1e-14;

fn check_channels(structure: &ProcessStructure, channels: &[ChoiOperator]) -> Result<()> {
    let slots = structure.slots();
    if slots.len() != channels.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} channels for {} slots",
            channels.len(),
            slots.len()
        )));
    }
    for (slot, ch) in slots.iter().zip(channels) {
        if ch.din() != slot.input.dim || ch.dout() != slot.output.dim {
            return Err(Error::DimensionMismatch(format!(
                "slot {} expects {}→{}, got {}→{}",
                slot.label,
                slot.input.dim,
                slot.output.dim,
                ch.din(),
                ch.dout()
            )));
        }
    }
    Ok(())
}

fn output_choi(structure: &ProcessStructure, matrix: ComplexMatrix) -> Result<ChoiOperator> {
    ChoiOperator::new_unchecked(matrix, structure.past_layout(), structure.future_layout())
}

/// Contracts a process with one Choi operator per slot (slots in label order)
/// and returns the Choi operator of the induced channel from the global past
/// to the global future.
pub fn apply_process(process: &Process, channels: &[ChoiOperator]) -> Result<ChoiOperator> {
    match process {
        Process::Matrix(w) => apply_process_matrix(w, channels),
        Process::Vector(w) => apply_process_vector(w, channels),
    }
}

/// `out[(p,f),(p',f')] = Σ_{s,s'} W[(p,s',f),(p',s,f')] J_S[s',s]`.
pub fn apply_process_matrix(w: &ProcessMatrix, channels: &[ChoiOperator]) -> Result<ChoiOperator> {
    let st = w.structure();
    check_channels(st, channels)?;
    let js = channels
        .iter()
        .fold(ComplexMatrix::identity(1), |acc, c| acc.kron(c.matrix()));
    let (dp, ds, df) = (st.past_dim(), st.slot_dim(), st.future_dim());
    let n = st.dim();
    let wd = w.matrix().data();
    let jd = js.data();
    let mut out = vec![ZERO; dp * df * dp * df];
    for p in 0..dp {
        for pp in 0..dp {
            for sp in 0..ds {
                for s in 0..ds {
                    let j = jd[sp * ds + s];
                    if j == ZERO {
                        continue;
                    }
                    for f in 0..df {
                        let row = st.index(p, sp, f) * n;
                        let o = (p * df + f) * dp * df + pp * df;
                        for fp in 0..df {
                            out[o + fp] += wd[row + st.index(pp, s, fp)] * j;
                        }
                    }
                }
            }
        }
    }
    output_choi(st, ComplexMatrix::from_raw(dp * df, dp * df, out))
}

/// Rank-one factor `coef · |left⟩⟨right|` of a slot Choi operator.
struct Factor {
    coef: C64,
    left: Vec<C64>,
    right: Option<Vec<C64>>,
}

fn factorize(j: &ComplexMatrix) -> Vec<Factor> {
    if j.hermiticity_defect() <= crate::tensor::HERMITIAN_TOL {
        let e = herm_eig_unchecked(j);
        e.values
            .iter()
            .enumerate()
            .filter(|(_, l)| l.abs() > SPECTRAL_CUTOFF)
            .map(|(k, &l)| Factor {
                coef: C64::new(l, 0.0),
                left: e.vector(k),
                right: None,
            })
            .collect()
    } else {
        let d = j.rows();
        let unit = |i: usize| {
            let mut v = vec![ZERO; d];
            v[i] = C64::new(1.0, 0.0);
            v
        };
        let mut out = Vec::new();
        for a in 0..d {
            for b in 0..d {
                if j[(a, b)] != ZERO {
                    out.push(Factor {
                        coef: j[(a, b)],
                        left: unit(a),
                        right: Some(unit(b)),
                    });
                }
            }
        }
        out
    }
}

/// Pure fast path: with `J_S = Σ_k c_k |L_k⟩⟨R_k|`, the output is
/// `Σ_k c_k |v(L_k)⟩⟨v(R_k)|` where `v(u)[p,f] = Σ_s u(s) w(p,s,f)`.
/// `|w⟩⟨w|` is never formed.
pub fn apply_process_vector(w: &ProcessVector, channels: &[ChoiOperator]) -> Result<ChoiOperator> {
    let st = w.structure();
    check_channels(st, channels)?;
    let (dp, df) = (st.past_dim(), st.future_dim());
    let slot_dims: Vec<usize> = st.slots().iter().map(|s| s.dim()).collect();
    let terms: Vec<(usize, Vec<usize>, C64)> = w
        .terms()
        .into_iter()
        .map(|(flat, amp)| {
            let (p, mut s, f) = st.split(flat);
            let mut digits = vec![0; slot_dims.len()];
            for (k, d) in slot_dims.iter().enumerate().rev() {
                digits[k] = s % d;
                s /= d;
            }
            (p * df + f, digits, amp)
        })
        .collect();
    let factors: Vec<Vec<Factor>> = channels.iter().map(|c| factorize(c.matrix())).collect();
    let n = dp * df;
    let mut out = vec![ZERO; n * n];
    let contract = |vecs: &[&[C64]]| {
        let mut v = vec![ZERO; n];
        for (x, digits, amp) in &terms {
            let mut a = *amp;
            for (u, &d) in vecs.iter().zip(digits) {
                a *= u[d];
            }
            v[*x] += a;
        }
        v
    };
    // Iterate over every combination of per-slot factors.
    let mut idx = vec![0usize; factors.len()];
    if factors.iter().any(|f| f.is_empty()) {
        return output_choi(st, ComplexMatrix::zeros(n, n));
    }
    loop {
        let chosen: Vec<&Factor> = idx.iter().zip(&factors).map(|(&i, f)| &f[i]).collect();
        let coef: C64 = chosen.iter().map(|f| f.coef).product();
        let lefts: Vec<&[C64]> = chosen.iter().map(|f| f.left.as_slice()).collect();
        let vl = contract(&lefts);
        let hermitian = chosen.iter().all(|f| f.right.is_none());
        let vr = if hermitian {
            None
        } else {
            let rights: Vec<&[C64]> = chosen
                .iter()
                .map(|f| f.right.as_deref().unwrap_or(&f.left))
                .collect();
            Some(contract(&rights))
        };
        let vr = vr.as_deref().unwrap_or(&vl);
        for a in 0..n {
            let ca = coef * vl[a];
            if ca == ZERO {
                continue;
            }
            for b in 0..n {
                out[a * n + b] += ca * vr[b].conj();
            }
        }
        // advance the mixed-radix counter
        let mut k = factors.len();
        loop {
            if k == 0 {
                return output_choi(st, ComplexMatrix::from_raw(n, n, out));
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < factors[k].len() {
                break;
            }
            idx[k] = 0;
        }
    }
}
