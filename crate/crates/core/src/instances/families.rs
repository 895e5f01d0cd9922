use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use super::{Atom, DistributionKind, DistributionSpec};
use crate::error::{invalid, Result};

/// `base = (1 - weight) member + weight payload`, with the payload sharing
/// the members' noise.
#[derive(Debug, Clone, PartialEq)]
pub struct MixtureWitness {
    pub member: usize,
    pub weight: BigRational,
    pub payload: DistributionSpec,
    /// Exact payload masses; `payload` carries them rounded to `f64`.
    pub payload_atoms: Vec<Atom>,
}

impl MixtureWitness {
    pub fn weight_f64(&self) -> f64 {
        self.weight.to_f64().unwrap_or(f64::NAN)
    }
}

/// An indexed family whose member 0 is the shared contaminated distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct HardFamily {
    pub members: Vec<DistributionSpec>,
    pub witnesses: Vec<MixtureWitness>,
}

impl HardFamily {
    pub fn base(&self) -> &DistributionSpec {
        &self.members[0]
    }
}

type AtomKey = Vec<u64>;

fn spec_masses(spec: &DistributionSpec) -> Result<BTreeMap<AtomKey, BigRational>> {
    let atoms = spec
        .exact_atoms()?
        .ok_or_else(|| invalid("mixture check needs a discrete distribution"))?;
    Ok(masses(atoms))
}

fn masses(atoms: Vec<Atom>) -> BTreeMap<AtomKey, BigRational> {
    let mut out: BTreeMap<AtomKey, BigRational> = BTreeMap::new();
    for (a, p) in atoms {
        let key = a.iter().map(|v| (v + 0.0).to_bits()).collect();
        *out.entry(key).or_insert_with(BigRational::zero) += p;
    }
    out
}

/// Checks the witness identity atom by atom in exact arithmetic.
pub fn verify_mixture(base: &DistributionSpec, member: &DistributionSpec, witness: &MixtureWitness) -> Result<()> {
    if base.noise != member.noise || base.noise != witness.payload.noise {
        return Err(invalid("mixture components have different noise"));
    }
    let (b, m) = (spec_masses(base)?, spec_masses(member)?);
    let p = masses(witness.payload_atoms.clone());
    let zero = BigRational::zero();
    let w = &witness.weight;
    let rest = BigRational::one() - w;
    for key in b.keys().chain(m.keys()).chain(p.keys()) {
        let lhs = b.get(key).unwrap_or(&zero);
        let rhs = &rest * m.get(key).unwrap_or(&zero) + w * p.get(key).unwrap_or(&zero);
        if *lhs != rhs {
            let atom: Vec<f64> = key.iter().map(|&b| f64::from_bits(b)).collect();
            return Err(invalid(format!(
                "mixture identity fails at atom {atom:?}: {lhs} != {rhs}"
            )));
        }
    }
    Ok(())
}

fn witness(member: usize, weight: &BigRational, noise: f64, atoms: Vec<Atom>) -> Result<MixtureWitness> {
    let d = atoms[0].0.len();
    let (points, probs) = atoms
        .iter()
        .map(|(a, p)| (a.clone(), p.to_f64().unwrap_or(f64::NAN)))
        .unzip();
    let payload = DistributionSpec::new(d, DistributionKind::CustomDiscrete { atoms: points, probs })?
        .with_noise(noise)?;
    Ok(MixtureWitness {
        member,
        weight: weight.clone(),
        payload,
        payload_atoms: atoms,
    })
}

fn finish(members: Vec<DistributionSpec>, witnesses: Vec<MixtureWitness>) -> Result<HardFamily> {
    for w in &witnesses {
        verify_mixture(&members[0], &members[w.member], w)?;
    }
    Ok(HardFamily { members, witnesses })
}

/// Members `0..=d+1` of the breakdown family with noise `1/(2 d r)`. Member 0
/// mixes each member `i` in `1..=d` with `e_i`, and member `d+1` with the
/// origin, at weight `1/(d+1)`.
pub fn breakdown_family(d: usize, r: f64) -> Result<HardFamily> {
    if d <= 3 {
        return Err(invalid(format!("breakdown family needs d > 3, got {d}")));
    }
    let members = (0..=d + 1)
        .map(|i| DistributionSpec::breakdown(d, i, r))
        .collect::<Result<Vec<_>>>()?;
    let noise = members[0].noise;
    let weight = BigRational::new(BigInt::one(), BigInt::from(d + 1));
    let mut witnesses = Vec::with_capacity(d + 1);
    for i in 1..=d + 1 {
        let mut atom = vec![0.0; d];
        if i <= d {
            atom[i - 1] = 1.0;
        }
        witnesses.push(witness(i, &weight, noise, vec![(atom, BigRational::one())])?);
    }
    finish(members, witnesses)
}

/// Members `0..=d` of the quantitative family with noise `eta/(4 r)`. Member 0
/// mixes member `i` with `d eta` on `e_i` and `1 - d eta` on `1/d` at weight `1/d`,
/// so the two are within total variation `eta`.
pub fn quant_family(d: usize, eta: f64) -> Result<HardFamily> {
    if d <= 3 {
        return Err(invalid(format!("quantitative family needs d > 3, got {d}")));
    }
    if !(eta > 0.0 && eta < 1.0 / (d as f64 + 1.0)) {
        return Err(invalid(format!("eta must lie in (0, 1/(d+1)), got {eta}")));
    }
    let members = (0..=d)
        .map(|i| DistributionSpec::quant(d, i, eta))
        .collect::<Result<Vec<_>>>()?;
    let noise = members[0].noise;
    let weight = BigRational::new(BigInt::one(), BigInt::from(d));
    let mut witnesses = Vec::with_capacity(d);
    for i in 1..=d {
        let centre = members[i].exact_atoms()?.expect("discrete")[d].clone();
        let mut axis = vec![0.0; d];
        axis[i - 1] = 1.0;
        let axis_mass = BigRational::one() - &centre.1;
        witnesses.push(witness(i, &weight, noise, vec![(axis, axis_mass), centre])?);
    }
    finish(members, witnesses)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn breakdown_mixtures_hold_exactly() {
        for d in [4, 5, 9] {
            let fam = breakdown_family(d, 1.5).unwrap();
            assert_eq!(fam.members.len(), d + 2);
            assert_eq!(fam.witnesses.len(), d + 1);
            assert!(fam.witnesses.iter().all(|w| w.weight_f64() == 1.0 / (d as f64 + 1.0)));
        }
        assert!(breakdown_family(3, 1.0).is_err());
        assert!(breakdown_family(5, 0.0).is_err());
    }

    #[test]
    fn quant_mixtures_hold_exactly() {
        for (d, eta) in [(4, 0.1), (5, 0.01), (8, 0.1)] {
            let fam = quant_family(d, eta).unwrap();
            assert_eq!(fam.members.len(), d + 1);
            assert_eq!(fam.witnesses.len(), d);
        }
        assert!(quant_family(4, 0.2).is_err());
        assert!(quant_family(4, 0.0).is_err());
    }

    #[test]
    fn wrong_witness_is_rejected() {
        let fam = breakdown_family(4, 1.0).unwrap();
        let mut w = fam.witnesses[0].clone();
        w.weight = BigRational::new(BigInt::one(), BigInt::from(4));
        assert!(verify_mixture(&fam.members[0], &fam.members[1], &w).is_err());
        let w = fam.witnesses[1].clone();
        assert!(verify_mixture(&fam.members[0], &fam.members[1], &w).is_err());
    }
}
