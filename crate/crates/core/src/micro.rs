//! Spin-level view of the loop on small systems.
//!
//! Sites are `(type, position)` pairs with `k` types and `N` positions per
//! type; a configuration assigns `+1` (molecule present) or `-1` to each
//! site. Exact enumeration (Gibbs measure, generator, reversibility) is
//! limited to `k * N <= ENUMERATION_LIMIT` sites.
//!
//! The Hamiltonian sums over all ordered site pairs, diagonal included. With
//! the mean-field couplings the same-type entries all equal `kappa_i`, so the
//! diagonal only shifts `H` by a constant.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::Exp1;

use crate::error::{Error, Result};
use crate::jump::lattice_index;
use crate::model::{flip_rates, DensityState, FlipRates, LoopSpec};
use crate::rng::{stream_rng, SimRng};
use crate::trajectory::{Trajectory, TrajectoryKind, TrajectoryMeta};

/// Maximum number of sites for exact enumeration (2^20 configurations).
pub const ENUMERATION_LIMIT: usize = 20;

/// Spin values over `types x positions`, stored type-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinConfiguration {
    spec: LoopSpec,
    spins: Vec<i8>,
}

impl SpinConfiguration {
    pub fn new(spec: &LoopSpec, spins: Vec<i8>) -> Result<Self> {
        let sites = spec.k() * spec.capacity();
        if spins.len() != sites {
            return Err(Error::DimensionMismatch {
                expected: sites,
                got: spins.len(),
            });
        }
        if spins.iter().any(|&s| s != 1 && s != -1) {
            return Err(Error::InvalidState("spins must be +1 or -1".into()));
        }
        Ok(Self {
            spec: spec.clone(),
            spins,
        })
    }

    pub fn uniform(spec: &LoopSpec, value: i8) -> Result<Self> {
        Self::new(spec, vec![value; spec.k() * spec.capacity()])
    }

    /// Configuration whose first `counts[i]` positions of type `i` are `+1`.
    pub fn from_counts(spec: &LoopSpec, counts: &[usize]) -> Result<Self> {
        let n = spec.capacity();
        if counts.len() != spec.k() || counts.iter().any(|&c| c > n) {
            return Err(Error::InvalidState(format!(
                "counts {counts:?} do not fit N = {n}"
            )));
        }
        let spins = counts
            .iter()
            .flat_map(|&c| (0..n).map(move |p| if p < c { 1 } else { -1 }))
            .collect();
        Self::new(spec, spins)
    }

    /// Decodes the enumeration index: bit `i * N + n` set means `+1`.
    pub fn from_index(spec: &LoopSpec, index: usize) -> Result<Self> {
        let sites = spec.k() * spec.capacity();
        let spins = (0..sites)
            .map(|b| if index >> b & 1 == 1 { 1 } else { -1 })
            .collect();
        Self::new(spec, spins)
    }

    pub fn index(&self) -> usize {
        self.spins
            .iter()
            .enumerate()
            .filter(|(_, &s)| s == 1)
            .fold(0, |acc, (b, _)| acc | 1 << b)
    }

    pub fn spec(&self) -> &LoopSpec {
        &self.spec
    }

    pub fn spin(&self, i: usize, n: usize) -> i8 {
        self.spins[i * self.spec.capacity() + n]
    }

    pub fn set(&mut self, i: usize, n: usize, value: i8) {
        debug_assert!(value == 1 || value == -1);
        let cap = self.spec.capacity();
        self.spins[i * cap + n] = value;
    }

    /// Number of `+1` spins per type.
    pub fn counts(&self) -> Vec<usize> {
        self.spins
            .chunks_exact(self.spec.capacity())
            .map(|col| col.iter().filter(|&&s| s == 1).count())
            .collect()
    }

    /// Density profile `X_i = #{n : sigma(i, n) = +1} / N`.
    pub fn projection(&self) -> DensityState {
        DensityState::from_counts(&self.counts(), self.spec.capacity())
            .expect("counts never exceed capacity")
    }
}

/// Energy change of a single-site transition split into the influence the
/// rest of the system exerts on the site (`delta_in`) and the influence the
/// site exerts on the rest (`delta_out`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyDelta {
    pub delta_in: f64,
    pub delta_out: f64,
    pub total: f64,
}

/// Mean-field coupling `alpha[(j, a), (i, b)]`: influence of a type-`j` spin
/// in state `a` on a type-`i` spin in state `b`.
fn alpha(spec: &LoopSpec, source: usize, source_spin: i8, target: usize, target_spin: i8) -> f64 {
    let j = spec.coupling();
    let d = spec.delta();
    let b = f64::from(target_spin);
    if target == spec.clockwise(source) && source_spin == 1 {
        -d * j * b
    } else if target == spec.anticlockwise(source) && source_spin == 1 {
        -(1.0 - d) * j * b
    } else if target == source {
        spec.kappa()[source]
    } else {
        0.0
    }
}

/// `H(sigma) = -(1/N) sum_{target} sum_{source} alpha[source; target]`.
pub fn hamiltonian(config: &SpinConfiguration) -> Result<f64> {
    let spec = config.spec();
    spec.require_types(3)?;
    let (k, n) = (spec.k(), spec.capacity());
    let mut sum = 0.0;
    for ti in 0..k {
        for tn in 0..n {
            let ts = config.spin(ti, tn);
            for si in 0..k {
                for sn in 0..n {
                    sum += alpha(spec, si, config.spin(si, sn), ti, ts);
                }
            }
        }
    }
    Ok(-sum / n as f64)
}

/// IN/OUT decomposition of the energy cost of moving site `(i, n)` from
/// state `from` to state `to`, other sites as in `config`.
pub fn energy_deltas(
    config: &SpinConfiguration,
    site: (usize, usize),
    from: i8,
    to: i8,
) -> Result<EnergyDelta> {
    let spec = config.spec();
    spec.require_types(3)?;
    if ![from, to].iter().all(|s| *s == 1 || *s == -1) {
        return Err(Error::InvalidState("spins must be +1 or -1".into()));
    }
    let (i, _) = site;
    let (k, cap) = (spec.k(), spec.capacity());
    let (mut delta_in, mut delta_out) = (0.0, 0.0);
    for j in 0..k {
        for l in 0..cap {
            let s = config.spin(j, l);
            delta_in += alpha(spec, j, s, i, from) - alpha(spec, j, s, i, to);
            delta_out += alpha(spec, i, from, j, s) - alpha(spec, i, to, j, s);
        }
    }
    let (delta_in, delta_out) = (delta_in / cap as f64, delta_out / cap as f64);
    Ok(EnergyDelta {
        delta_in,
        delta_out,
        total: delta_in + delta_out,
    })
}

fn enumeration_guard(spec: &LoopSpec) -> Result<usize> {
    let sites = spec.k() * spec.capacity();
    if sites > ENUMERATION_LIMIT {
        return Err(Error::EnumerationGuard {
            sites,
            limit: ENUMERATION_LIMIT,
        });
    }
    Ok(1 << sites)
}

/// Gibbs probabilities `exp(-H) / Z`, indexed by [`SpinConfiguration::index`].
pub fn gibbs_measure(spec: &LoopSpec) -> Result<Vec<f64>> {
    spec.require_types(3)?;
    let states = enumeration_guard(spec)?;
    let energies = (0..states)
        .map(|s| hamiltonian(&SpinConfiguration::from_index(spec, s)?))
        .collect::<Result<Vec<_>>>()?;
    let min = energies.iter().copied().fold(f64::INFINITY, f64::min);
    let weights: Vec<f64> = energies.iter().map(|h| (min - h).exp()).collect();
    let z: f64 = weights.iter().sum();
    Ok(weights.into_iter().map(|w| w / z).collect())
}

/// Single-site flip generator over all `2^(kN)` configurations.
///
/// Stored row-wise: each configuration has exactly `kN` outgoing flips.
#[derive(Debug, Clone)]
pub struct SpinGenerator {
    sites: usize,
    // rates[s * sites + b]: rate of flipping bit b out of configuration s
    rates: Vec<f64>,
}

impl SpinGenerator {
    pub fn dim(&self) -> usize {
        1 << self.sites
    }

    /// `q(from, to)`; zero unless the two differ in exactly one site.
    pub fn rate(&self, from: usize, to: usize) -> f64 {
        let diff = from ^ to;
        if diff.count_ones() != 1 {
            return 0.0;
        }
        self.rates[from * self.sites + diff.trailing_zeros() as usize]
    }

    pub fn diagonal(&self, from: usize) -> f64 {
        -self.exit_rate(from)
    }

    pub fn exit_rate(&self, from: usize) -> f64 {
        self.rates[from * self.sites..(from + 1) * self.sites]
            .iter()
            .sum()
    }

    /// Off-diagonal entries `(to, rate)` of a row.
    pub fn row(&self, from: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        (0..self.sites).map(move |b| (from ^ (1 << b), self.rates[from * self.sites + b]))
    }

    /// Sum of a full row including the diagonal.
    pub fn row_sum(&self, from: usize) -> f64 {
        self.row(from).map(|(_, r)| r).sum::<f64>() + self.diagonal(from)
    }
}

fn site_rates(spec: &LoopSpec, counts: &[usize]) -> Result<Vec<FlipRates>> {
    let x: Vec<f64> = counts
        .iter()
        .map(|&c| c as f64 / spec.capacity() as f64)
        .collect();
    (0..spec.k()).map(|i| flip_rates(spec, &x, i)).collect()
}

/// Exact generator of the spin dynamics with flip rates
/// `exp(+-2[-delta J a+/N - (1-delta) J h+/N + kappa_i])`.
pub fn generator_matrix(spec: &LoopSpec) -> Result<SpinGenerator> {
    let states = enumeration_guard(spec)?;
    let (k, cap) = (spec.k(), spec.capacity());
    let sites = k * cap;
    let type_mask = (1usize << cap) - 1;
    let mut rates = vec![0.0; states * sites];
    for s in 0..states {
        let counts: Vec<usize> = (0..k)
            .map(|i| ((s >> (i * cap)) & type_mask).count_ones() as usize)
            .collect();
        let per_type = site_rates(spec, &counts)?;
        for b in 0..sites {
            let r = per_type[b / cap];
            rates[s * sites + b] = if s >> b & 1 == 1 { r.down } else { r.up };
        }
    }
    Ok(SpinGenerator { sites, rates })
}

/// `max |mu(s) q(s, s') - mu(s') q(s', s)|` over all configuration pairs,
/// with `mu` the Gibbs measure. Zero iff the dynamics is reversible for `mu`.
pub fn reversibility_residual(spec: &LoopSpec) -> Result<f64> {
    let mu = gibbs_measure(spec)?;
    let q = generator_matrix(spec)?;
    let mut worst: f64 = 0.0;
    for s in 0..q.dim() {
        for (t, rate) in q.row(s) {
            if t > s {
                worst = worst.max((mu[s] * rate - mu[t] * q.rate(t, s)).abs());
            }
        }
    }
    Ok(worst)
}

/// Generator of the projected density process obtained by lumping spin
/// configurations with equal per-type counts.
#[derive(Debug, Clone)]
pub struct LumpedGenerator {
    /// Rows and columns follow [`lattice_index`].
    pub matrix: DMatrix<f64>,
    /// Largest disagreement between members of one class in their aggregated
    /// rate into another class; zero for an exactly lumpable chain.
    pub lumpability_defect: f64,
}

pub fn lumped_generator(spec: &LoopSpec) -> Result<LumpedGenerator> {
    let q = generator_matrix(spec)?;
    let (k, cap) = (spec.k(), spec.capacity());
    let classes = (cap + 1).pow(k as u32);
    let class_of = |s: usize| {
        let counts = SpinConfiguration::from_index(spec, s)
            .expect("index within range")
            .counts();
        lattice_index(&counts, cap)
    };
    let mut matrix = DMatrix::<f64>::zeros(classes, classes);
    let mut seen = vec![false; classes];
    let mut defect: f64 = 0.0;
    let mut row = vec![0.0; classes];
    for s in 0..q.dim() {
        let c = class_of(s);
        row.iter_mut().for_each(|v| *v = 0.0);
        for (t, rate) in q.row(s) {
            row[class_of(t)] += rate;
        }
        row[c] += q.diagonal(s);
        if seen[c] {
            for (d, &v) in row.iter().enumerate() {
                defect = defect.max((matrix[(c, d)] - v).abs());
            }
        } else {
            seen[c] = true;
            for (d, &v) in row.iter().enumerate() {
                matrix[(c, d)] = v;
            }
        }
    }
    Ok(LumpedGenerator {
        matrix,
        lumpability_defect: defect,
    })
}

/// Per-site stochastic dynamics with event-driven (Gillespie) updates.
///
/// Sites of one type and spin value share a flip rate, so an event first
/// picks a `(type, direction)` group by its aggregate rate and then a site
/// uniformly inside the group. Position lists make both O(1).
pub struct MicroSimulator {
    config: SpinConfiguration,
    // positions currently +1 (index 0) and -1 (index 1), per type
    lists: Vec<[Vec<usize>; 2]>,
    slot: Vec<usize>,
    rng: SimRng,
    time: f64,
}

/// One flip: site `(type_index, position)` moved to `new_spin` at `time`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MicroEvent {
    pub time: f64,
    pub type_index: usize,
    pub position: usize,
    pub new_spin: i8,
}

impl MicroSimulator {
    pub fn new(config: SpinConfiguration, seed: u64) -> Self {
        let spec = config.spec().clone();
        let (k, cap) = (spec.k(), spec.capacity());
        let mut lists: Vec<[Vec<usize>; 2]> = (0..k).map(|_| [Vec::new(), Vec::new()]).collect();
        let mut slot = vec![0; k * cap];
        for i in 0..k {
            for n in 0..cap {
                let which = usize::from(config.spin(i, n) != 1);
                slot[i * cap + n] = lists[i][which].len();
                lists[i][which].push(n);
            }
        }
        Self {
            config,
            lists,
            slot,
            rng: stream_rng(seed, 0),
            time: 0.0,
        }
    }

    pub fn config(&self) -> &SpinConfiguration {
        &self.config
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    fn type_rates(&self) -> Vec<FlipRates> {
        site_rates(self.config.spec(), &self.config.counts())
            .expect("rates of a validated loop on the unit box are finite")
    }

    /// Flip rate of one site in the current configuration.
    pub fn site_rate(&self, i: usize, n: usize) -> f64 {
        let r = self.type_rates()[i];
        if self.config.spin(i, n) == 1 {
            r.down
        } else {
            r.up
        }
    }

    /// Aggregate rates `[up_0, down_0, up_1, ...]` summed site by site.
    pub fn aggregate_rates(&self) -> Vec<f64> {
        let spec = self.config.spec();
        let rates = self.type_rates();
        let mut out = vec![0.0; 2 * spec.k()];
        for i in 0..spec.k() {
            for n in 0..spec.capacity() {
                if self.config.spin(i, n) == 1 {
                    out[2 * i + 1] += rates[i].down;
                } else {
                    out[2 * i] += rates[i].up;
                }
            }
        }
        out
    }

    /// Total flip rate out of the current configuration.
    pub fn total_rate(&self) -> f64 {
        self.group_rates().iter().sum()
    }

    fn group_rates(&self) -> Vec<f64> {
        let rates = self.type_rates();
        self.lists
            .iter()
            .zip(&rates)
            .flat_map(|(l, r)| [l[1].len() as f64 * r.up, l[0].len() as f64 * r.down])
            .collect()
    }

    /// Advances to the next flip if it happens before `horizon`; otherwise
    /// sets the clock to `horizon` and returns `None`.
    pub fn step(&mut self, horizon: f64) -> Result<Option<MicroEvent>> {
        let groups = self.group_rates();
        let total: f64 = groups.iter().sum();
        if !(total > 0.0) {
            return Err(Error::AbsorbingState { time: self.time });
        }
        let wait: f64 = self.rng.sample::<f64, _>(Exp1) / total;
        if self.time + wait >= horizon {
            self.time = horizon;
            return Ok(None);
        }
        self.time += wait;
        let target = self.rng.random::<f64>() * total;
        let mut acc = 0.0;
        let mut group = groups
            .iter()
            .rposition(|&g| g > 0.0)
            .expect("positive total");
        for (g, &r) in groups.iter().enumerate() {
            acc += r;
            if target < acc {
                group = g;
                break;
            }
        }
        let i = group / 2;
        // group 2i: an up-flip drawn from the -1 list; 2i+1: down-flip from the +1 list
        let from_list = if group % 2 == 0 { 1 } else { 0 };
        let len = self.lists[i][from_list].len();
        let pick = self.rng.random_range(0..len);
        let n = self.lists[i][from_list][pick];
        self.move_site(i, n, from_list);
        let new_spin = if from_list == 1 { 1 } else { -1 };
        self.config.set(i, n, new_spin);
        Ok(Some(MicroEvent {
            time: self.time,
            type_index: i,
            position: n,
            new_spin,
        }))
    }

    fn move_site(&mut self, i: usize, n: usize, from_list: usize) {
        let cap = self.config.spec().capacity();
        let idx = self.slot[i * cap + n];
        let list = &mut self.lists[i][from_list];
        list.swap_remove(idx);
        if let Some(&moved) = list.get(idx) {
            self.slot[i * cap + moved] = idx;
        }
        let dest = &mut self.lists[i][1 - from_list];
        self.slot[i * cap + n] = dest.len();
        dest.push(n);
    }
}

/// Simulates the spin system on `[0, t_end]` and records its density
/// projection after every flip, plus the initial and final states.
pub fn micro_simulate(
    spec: &LoopSpec,
    initial: &SpinConfiguration,
    t_end: f64,
    seed: u64,
) -> Result<Trajectory> {
    if !t_end.is_finite() || t_end < 0.0 {
        return Err(Error::param(
            "t_end",
            format!("must be finite and >= 0, got {t_end}"),
        ));
    }
    if initial.spec() != spec {
        return Err(Error::InvalidState(
            "configuration belongs to a different loop".into(),
        ));
    }
    let mut traj = Trajectory::new(
        spec.k(),
        TrajectoryKind::Stochastic,
        TrajectoryMeta::Micro {
            spec: spec.clone(),
            seed,
        },
    );
    let mut sim = MicroSimulator::new(initial.clone(), seed);
    let cap = spec.capacity() as f64;
    let mut counts: Vec<usize> = initial.counts();
    let mut x: Vec<f64> = counts.iter().map(|&c| c as f64 / cap).collect();
    traj.push(0.0, &x);
    if t_end == 0.0 {
        return Ok(traj);
    }
    while let Some(ev) = sim.step(t_end)? {
        if ev.new_spin == 1 {
            counts[ev.type_index] += 1;
        } else {
            counts[ev.type_index] -= 1;
        }
        x[ev.type_index] = counts[ev.type_index] as f64 / cap;
        traj.push(ev.time, &x);
    }
    traj.push(t_end, &x);
    Ok(traj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn directed(kappa: f64) -> LoopSpec {
        LoopSpec::new(3, 2.0, 1.0, vec![kappa; 3], 1).unwrap()
    }

    #[test]
    fn hamiltonian_hand_values() {
        let spec = directed(0.0);
        let up = SpinConfiguration::uniform(&spec, 1).unwrap();
        let down = SpinConfiguration::uniform(&spec, -1).unwrap();
        assert_relative_eq!(hamiltonian(&up).unwrap(), 6.0, epsilon = 1e-14);
        assert_eq!(hamiltonian(&down).unwrap(), 0.0);

        let free = LoopSpec::new(3, 0.0, 0.3, vec![0.0; 3], 2).unwrap();
        for s in 0..64 {
            let c = SpinConfiguration::from_index(&free, s).unwrap();
            assert_eq!(hamiltonian(&c).unwrap(), 0.0);
        }
    }

    #[test]
    fn hamiltonian_needs_three_types() {
        let spec = LoopSpec::with_half_coupling(4, 1.0, 0.5, 1).unwrap();
        let c = SpinConfiguration::uniform(&spec, 1).unwrap();
        assert!(matches!(
            hamiltonian(&c),
            Err(Error::UnsupportedTypeCount {
                expected: 3,
                got: 4
            })
        ));
    }

    #[test]
    fn identity_flip_costs_nothing() {
        let spec = LoopSpec::clock(1.7, 0.3, 2).unwrap();
        let c = SpinConfiguration::from_index(&spec, 0b101101).unwrap();
        let d = energy_deltas(&c, (1, 0), 1, 1).unwrap();
        assert_eq!((d.delta_in, d.delta_out, d.total), (0.0, 0.0, 0.0));
    }

    #[test]
    fn deltas_are_antisymmetric() {
        let spec = LoopSpec::new(3, -1.3, 0.7, vec![0.2, -0.4, 0.9], 2).unwrap();
        for s in 0..64 {
            let c = SpinConfiguration::from_index(&spec, s).unwrap();
            for i in 0..3 {
                let fwd = energy_deltas(&c, (i, 1), -1, 1).unwrap();
                let back = energy_deltas(&c, (i, 1), 1, -1).unwrap();
                assert_eq!(fwd.delta_in, -back.delta_in);
                assert_eq!(fwd.delta_out, -back.delta_out);
            }
        }
    }

    #[test]
    fn in_part_reproduces_flip_rates_without_field() {
        // With kappa = 0 the rate exp(-Delta_IN) coincides with the closed form.
        let spec = LoopSpec::new(3, 1.4, 0.35, vec![0.0; 3], 3).unwrap();
        for s in [0usize, 0b101_011_110, 0b111_000_101, 511] {
            let mut c = SpinConfiguration::from_index(&spec, s).unwrap();
            let x = c.projection();
            for i in 0..3 {
                let r = flip_rates(&spec, x.as_slice(), i).unwrap();
                let current = c.spin(i, 0);
                c.set(i, 0, -1);
                let up = energy_deltas(&c, (i, 0), -1, 1).unwrap();
                c.set(i, 0, current);
                // the flipping site itself does not influence its own rate
                assert_relative_eq!((-up.delta_in).exp(), r.up, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn gibbs_uniform_without_interactions() {
        let spec = LoopSpec::new(3, 0.0, 0.5, vec![0.0; 3], 1).unwrap();
        let mu = gibbs_measure(&spec).unwrap();
        assert_eq!(mu.len(), 8);
        for p in mu {
            assert_relative_eq!(p, 0.125, epsilon = 1e-15);
        }
    }

    #[test]
    fn guard_rejects_large_systems() {
        let spec = LoopSpec::clock(1.0, 0.5, 7).unwrap();
        assert!(matches!(
            gibbs_measure(&spec),
            Err(Error::EnumerationGuard { .. })
        ));
        assert!(matches!(
            generator_matrix(&spec),
            Err(Error::EnumerationGuard { .. })
        ));
        assert!(reversibility_residual(&spec).is_err());
    }

    #[test]
    fn generator_rows_and_unit_rates() {
        let spec = LoopSpec::new(3, 0.0, 0.5, vec![0.0; 3], 2).unwrap();
        let q = generator_matrix(&spec).unwrap();
        for s in 0..q.dim() {
            assert!(q.row_sum(s).abs() < 1e-12);
            assert!(q.row(s).all(|(_, r)| r == 1.0));
            assert_eq!(q.rate(s, s ^ 0b11), 0.0);
        }
    }

    #[test]
    fn generator_hand_rate() {
        // A = -1, B = +1, C = -1; with delta = 0 only h(A) = B counts.
        let spec = LoopSpec::new(3, 2.0, 0.0, vec![1.0; 3], 1).unwrap();
        let q = generator_matrix(&spec).unwrap();
        let from = 0b010;
        assert_relative_eq!(
            q.rate(from, from | 0b001),
            (-2.0f64).exp(),
            max_relative = 1e-14
        );
    }

    #[test]
    fn config_index_roundtrip() {
        let spec = LoopSpec::clock(1.0, 0.5, 3).unwrap();
        for s in [0usize, 1, 77, 300, 511] {
            assert_eq!(SpinConfiguration::from_index(&spec, s).unwrap().index(), s);
        }
        let c = SpinConfiguration::from_counts(&spec, &[1, 3, 0]).unwrap();
        assert_eq!(c.counts(), vec![1, 3, 0]);
        assert!(SpinConfiguration::new(&spec, vec![0; 9]).is_err());
    }

    #[test]
    fn micro_zero_horizon() {
        let spec = LoopSpec::clock(1.0, 0.5, 5).unwrap();
        let c = SpinConfiguration::from_counts(&spec, &[1, 2, 3]).unwrap();
        let traj = micro_simulate(&spec, &c, 0.0, 9).unwrap();
        assert_eq!(traj.len(), 1);
        assert_eq!(traj.state(0), &[0.2, 0.4, 0.6]);
        assert!(micro_simulate(&spec, &c, f64::NAN, 9).is_err());
    }
}
