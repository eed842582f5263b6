//! Slow hierarchy references: dense commutators, ordered-map storage and a
//! private RK4 loop.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, C64};
use crate::model::{BathSpec, MoleculeChain};

pub type AdoMap = BTreeMap<Vec<u32>, CMatrix>;

/// Every multi-index of `sites` entries with sum below `cutoff`, grown rank
/// by rank.
pub fn reference_indices(sites: usize, cutoff: usize) -> Vec<Vec<u32>> {
    let mut all: Vec<Vec<u32>> = Vec::new();
    if cutoff == 0 {
        return all;
    }
    let mut layer = vec![vec![0u32; sites]];
    for _ in 0..cutoff {
        all.extend(layer.iter().cloned());
        let mut next: Vec<Vec<u32>> = Vec::new();
        for n in &layer {
            for j in 0..sites {
                let mut m = n.clone();
                m[j] += 1;
                if !next.contains(&m) {
                    next.push(m);
                }
            }
        }
        layer = next;
    }
    all
}

fn projector(n: usize, j: usize) -> CMatrix {
    let mut p = CMatrix::zeros(n, n);
    p[(j, j)] = C64::new(1.0, 0.0);
    p
}

fn hamiltonian(chain: &MoleculeChain, bath: &BathSpec, t: f64, with_lamb_shift: bool) -> CMatrix {
    let n = chain.len();
    CMatrix::from_fn(n, n, |a, b| {
        if a == b {
            let mut e = chain.site_energies()[a] + bath.reorganization[a];
            if with_lamb_shift {
                e += 2.0 * bath.scaling[a] * bath.reorganization[a] * libm::exp(-bath.relaxation[a] * t);
            }
            C64::new(e, 0.0)
        } else {
            C64::new(chain.couplings()[(a, b)], 0.0)
        }
    })
}

fn derivative(chain: &MoleculeChain, bath: &BathSpec, h: &CMatrix, ados: &AdoMap) -> AdoMap {
    let n = chain.len();
    let i = C64::new(0.0, 1.0);
    let mut out = AdoMap::new();
    for (index, sigma) in ados {
        let mut d = (h * sigma - sigma * h) * (-i);
        for j in 0..n {
            d -= sigma * C64::new(index[j] as f64 * bath.relaxation[j], 0.0);
            let p = projector(n, j);
            let mut up = index.clone();
            up[j] += 1;
            if let Some(s) = ados.get(&up) {
                d += (&p * s - s * &p) * i;
            }
            if index[j] > 0 {
                let mut down = index.clone();
                down[j] -= 1;
                let s = &ados[&down];
                let c = 2.0 * bath.reorganization[j] * bath.thermal_energy;
                let comm = (&p * s - s * &p) * (i * c);
                let anti = (&p * s + s * &p) * C64::new(bath.reorganization[j] * bath.relaxation[j], 0.0);
                d += (comm + anti) * C64::new(index[j] as f64, 0.0);
            }
        }
        out.insert(index.clone(), d);
    }
    out
}

/// Hierarchy time derivative evaluated index by index.
pub fn naive_heom_rhs(chain: &MoleculeChain, bath: &BathSpec, t: f64, ados: &AdoMap) -> AdoMap {
    derivative(chain, bath, &hamiltonian(chain, bath, t, true), ados)
}

fn combine(base: &AdoMap, k: &AdoMap, h: f64) -> AdoMap {
    base.iter().map(|(key, m)| (key.clone(), m + &k[key] * C64::new(h, 0.0))).collect()
}

/// Standard local-bath hierarchy with the static Hamiltonian
/// `diag(Ω_j + λ_j) + J`, integrated by fixed-step RK4. Returns `ρ_e` at `t = 0`
/// and at every multiple of `dt_out` up to `tmax`.
pub fn static_local_heom(
    chain: &MoleculeChain,
    bath: &BathSpec,
    rho0: &CMatrix,
    cutoff: usize,
    tmax: f64,
    dt_out: f64,
    step: f64,
) -> Result<Vec<CMatrix>> {
    if !(step > 0.0) || !(dt_out > 0.0) {
        return Err(Error::InvalidParameter(alloc::format!("step and dt_out must be positive")));
    }
    let n = chain.len();
    let h = hamiltonian(chain, bath, 0.0, false);
    let mut ados: AdoMap = reference_indices(n, cutoff).into_iter().map(|k| (k, CMatrix::zeros(n, n))).collect();
    ados.insert(vec![0; n], rho0.clone());
    let root = vec![0u32; n];
    let outputs = libm::round(tmax / dt_out) as usize;
    let substeps = libm::ceil(dt_out / step * (1.0 - 1e-12)).max(1.0) as usize;
    let hs = dt_out / substeps as f64;
    let mut snapshots = vec![ados[&root].clone()];
    for _ in 0..outputs {
        for _ in 0..substeps {
            let k1 = derivative(chain, bath, &h, &ados);
            let k2 = derivative(chain, bath, &h, &combine(&ados, &k1, 0.5 * hs));
            let k3 = derivative(chain, bath, &h, &combine(&ados, &k2, 0.5 * hs));
            let k4 = derivative(chain, bath, &h, &combine(&ados, &k3, hs));
            for (key, m) in ados.iter_mut() {
                *m += (&k1[key] + (&k2[key] + &k3[key]) * C64::new(2.0, 0.0) + &k4[key]) * C64::new(hs / 6.0, 0.0);
            }
        }
        snapshots.push(ados[&root].clone());
    }
    Ok(snapshots)
}
