use num_complex::Complex64;

use super::spectra::check_energies;
use super::{Axis, GoldenRuleError, PoleMeta, Spectrum, Superposition};
use crate::deltashell::{matrix_element, SystemParams};

/// Energy density of a superposition, split into its pieces.
#[derive(Clone, Debug, PartialEq)]
pub struct InterferenceTerms {
    pub grid: Vec<f64>,
    /// `|c_j|² L_j(E) |⟨E|V|E_j⟩|²` for each term.
    pub diagonal: Vec<Vec<f64>>,
    /// Sum of `2 Re` cross terms over all pairs.
    pub cross: Vec<f64>,
    /// Diagonal plus cross.
    pub total: Vec<f64>,
    /// `|Σ_j c_j ⟨E|V|E_j⟩ / (E − E_j + iΓ_j/2)|²` evaluated as one modulus.
    pub direct: Vec<f64>,
}

/// Evaluates `|Σ_j c_j ⟨p⃗|V|p_j⟩ / (E − E_j + iΓ_j/2)|²` per unit energy,
/// integrated over angles, both in expanded form and directly.
pub fn interference_decomposition(
    sup: &Superposition,
    grid: &[f64],
    params: &SystemParams,
) -> Result<InterferenceTerms, GoldenRuleError> {
    check_energies(grid)?;
    let terms = sup.terms();
    let mass = params.mass;
    let n = terms.len();
    let mut out = InterferenceTerms {
        grid: grid.to_vec(),
        diagonal: vec![Vec::with_capacity(grid.len()); n],
        cross: Vec::with_capacity(grid.len()),
        total: Vec::with_capacity(grid.len()),
        direct: Vec::with_capacity(grid.len()),
    };
    let i = Complex64::i();
    let mut elements = vec![Complex64::new(0.0, 0.0); n];
    let mut denominators = vec![Complex64::new(0.0, 0.0); n];
    for &e in grid {
        // the density of states m·p cancels the 1/(mp) of the momentum
        // matrix element, and ∫|Y₀⁰|²dΩ = 1
        let p = (2.0 * mass * e).sqrt();
        for (j, (_, pole)) in terms.iter().enumerate() {
            elements[j] = matrix_element(p, pole, params)?;
            denominators[j] = e - pole.e_r + i * (0.5 * pole.gamma_r);
        }

        let mut diagonal_sum = 0.0;
        for (j, (c, _)) in terms.iter().enumerate() {
            let v = c.norm_sqr() * elements[j].norm_sqr() / denominators[j].norm_sqr();
            out.diagonal[j].push(v);
            diagonal_sum += v;
        }
        let mut cross = 0.0;
        for a in 0..n {
            for b in (a + 1)..n {
                let numerator = terms[a].0 * terms[b].0.conj() * elements[a] * elements[b].conj();
                let denominator = denominators[a] * denominators[b].conj();
                cross += 2.0 * (numerator / denominator).re;
            }
        }
        let amplitude: Complex64 = terms
            .iter()
            .enumerate()
            .map(|(j, (c, _))| c * elements[j] / denominators[j])
            .sum();
        out.cross.push(cross);
        out.total.push(diagonal_sum + cross);
        out.direct.push(amplitude.norm_sqr());
    }
    Ok(out)
}

/// Expanded superposition spectrum (diagonal plus cross terms).
pub fn interference_spectrum(
    sup: &Superposition,
    grid: &[f64],
    params: &SystemParams,
) -> Result<Spectrum, GoldenRuleError> {
    let terms = interference_decomposition(sup, grid, params)?;
    let meta = sup.terms().iter().map(|(_, p)| PoleMeta::from(p)).collect();
    Spectrum::new(Axis::Energy, terms.grid, terms.total, meta)
}
