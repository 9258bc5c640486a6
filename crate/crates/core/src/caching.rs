//! Symbolic placement and delivery for vector coded caching.
//!
//! Files are split into one subfile per `t`-subset of the `Λ` cache states,
//! where `t = Λγ`. Users of cache state `g` store every subfile whose subset
//! contains `g`. Delivery walks over all `(t+1)`-subsets `Ψ` of states; in each
//! stage every group `ψ ∈ Ψ` receives the subfile labelled `Ψ ∖ {ψ}` of each
//! served user's file, and the receivers strip the other groups' payloads
//! using their caches.
//!
//! Nothing here carries data bytes: a subfile is the pair (file, subset).

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};

/// A subset of the cache states, stored as a bitmask (state `g` ↔ bit `g`).
///
/// Integer order on the mask is colexicographic order on the subsets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct GroupSet(pub u64);

impl GroupSet {
    pub const EMPTY: GroupSet = GroupSet(0);

    pub fn from_groups(groups: &[usize]) -> Self {
        GroupSet(groups.iter().fold(0, |m, &g| m | (1 << g)))
    }

    pub fn contains(self, g: usize) -> bool {
        self.0 >> g & 1 == 1
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn without(self, g: usize) -> Self {
        GroupSet(self.0 & !(1 << g))
    }

    pub fn with(self, g: usize) -> Self {
        GroupSet(self.0 | (1 << g))
    }

    /// Members in increasing order.
    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut m = self.0;
        std::iter::from_fn(move || {
            if m == 0 {
                return None;
            }
            let g = m.trailing_zeros() as usize;
            m &= m - 1;
            Some(g)
        })
    }
}

/// Prints 1-based members, e.g. `{1,3}`.
impl fmt::Display for GroupSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<String> = self.iter().map(|g| (g + 1).to_string()).collect();
        write!(f, "{{{}}}", items.join(","))
    }
}

/// All `k`-subsets of `{0, …, n−1}` in colexicographic order.
pub fn subsets(n: usize, k: usize) -> Vec<GroupSet> {
    assert!(n < 64, "at most 63 cache states are supported");
    if k > n {
        return Vec::new();
    }
    if k == 0 {
        return vec![GroupSet::EMPTY];
    }
    let limit = 1u64 << n;
    let mut out = Vec::new();
    let mut m: u64 = (1 << k) - 1;
    while m < limit {
        out.push(GroupSet(m));
        // Gosper's hack: next integer with the same popcount.
        let c = m & m.wrapping_neg();
        let r = m + c;
        m = (((r ^ m) >> 2) / c) | r;
    }
    out
}

pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) as u64 / (i + 1) as u64)
}

/// Symbolic subfile `W_n^T`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SubfileLabel {
    pub file: usize,
    pub subset: GroupSet,
}

impl fmt::Display for SubfileLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.file + 1, self.subset)
    }
}

/// Placement of a library of `files` files over `lambda` cache states.
#[derive(Debug, Clone, PartialEq)]
pub struct PlacementPlan {
    pub lambda: usize,
    /// `Λγ`, the number of states that store each subfile.
    pub t: usize,
    pub users: usize,
    pub files: usize,
    /// Cache state of every user. Built as `u mod Λ`; exposed so tests can
    /// corrupt it.
    pub user_state: Vec<usize>,
    subset_universe: Vec<GroupSet>,
}

/// Builds the placement for cache fraction `gamma`; `Λγ` must be an integer
/// and `users` a multiple of `lambda`.
pub fn build_placement(
    lambda: usize,
    gamma: f64,
    users: usize,
    files: usize,
) -> Result<PlacementPlan> {
    if !(0.0..=1.0).contains(&gamma) {
        return Err(Error::InvalidConfiguration(format!(
            "gamma must lie in [0, 1], got {gamma}"
        )));
    }
    let lg = lambda as f64 * gamma;
    let t = lg.round();
    if (lg - t).abs() > 1e-9 {
        return Err(Error::InvalidConfiguration(format!(
            "Λγ = {lg} is not an integer"
        )));
    }
    PlacementPlan::new(lambda, t as usize, users, files)
}

impl PlacementPlan {
    /// Same as [`build_placement`] with `Λγ = t` given directly.
    pub fn new(lambda: usize, t: usize, users: usize, files: usize) -> Result<Self> {
        if lambda == 0 || lambda >= 64 {
            return Err(Error::InvalidConfiguration(format!(
                "Λ must lie in 1..=63, got {lambda}"
            )));
        }
        if t > lambda {
            return Err(Error::InvalidConfiguration(format!(
                "Λγ = {t} exceeds Λ = {lambda}"
            )));
        }
        if users == 0 || !users.is_multiple_of(lambda) {
            return Err(Error::InvalidConfiguration(format!(
                "user count {users} must be a positive multiple of Λ = {lambda}"
            )));
        }
        Ok(Self {
            lambda,
            t,
            users,
            files,
            user_state: (0..users).map(|u| u % lambda).collect(),
            subset_universe: subsets(lambda, t),
        })
    }

    /// Users per cache state, `B = K/Λ`.
    pub fn users_per_state(&self) -> usize {
        self.users / self.lambda
    }

    /// Number of groups served at once, `G = Λγ + 1`.
    pub fn coded_caching_gain(&self) -> usize {
        self.t + 1
    }

    pub fn subfile_subsets(&self) -> &[GroupSet] {
        &self.subset_universe
    }

    /// Index of user `u` inside its cache state under the default assignment.
    pub fn position(&self, user: usize) -> usize {
        user / self.lambda
    }

    /// User at `position` of cache state `state` under the default assignment.
    pub fn user_at(&self, state: usize, position: usize) -> usize {
        position * self.lambda + state
    }

    pub fn state_caches(&self, state: usize, label: &SubfileLabel) -> bool {
        label.subset.contains(state)
    }

    /// All labels stored by cache state `state`.
    pub fn cache_state(&self, state: usize) -> Vec<SubfileLabel> {
        (0..self.files)
            .flat_map(|file| {
                self.subset_universe
                    .iter()
                    .filter(move |s| s.contains(state))
                    .map(move |&subset| SubfileLabel { file, subset })
            })
            .collect()
    }

    /// Cached share of one file as `(numerator, denominator)`.
    pub fn cached_fraction(&self, state: usize) -> (u64, u64) {
        let num = self
            .subset_universe
            .iter()
            .filter(|s| s.contains(state))
            .count() as u64;
        (num, self.subset_universe.len() as u64)
    }
}

/// Distinct files, user `u` asking for file `u`.
pub fn distinct_demands(users: usize) -> Vec<usize> {
    (0..users).collect()
}

/// One subfile sent to one user inside a transmission.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Payload {
    /// Cache state of the addressed group, 0-based.
    pub group: usize,
    /// Slot of the user within its group in this transmission, 0-based.
    pub slot: usize,
    pub user: usize,
    pub label: SubfileLabel,
}

/// One stage of one round: `G` groups served at once.
#[derive(Debug, Clone, PartialEq)]
pub struct Transmission {
    pub stage: usize,
    pub round: usize,
    pub groups: GroupSet,
    pub payloads: Vec<Payload>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeliverySchedule {
    pub q: usize,
    pub stages: Vec<GroupSet>,
    pub rounds: usize,
    pub transmissions: Vec<Transmission>,
}

/// Schedules delivery of `demands` serving `q` users per group per stage.
///
/// When `q` does not divide `B` the last round serves the `B mod q` leftover
/// users of every group.
pub fn build_schedule(
    plan: &PlacementPlan,
    q: usize,
    demands: &[usize],
) -> Result<DeliverySchedule> {
    let b = plan.users_per_state();
    if q == 0 || q > b {
        return Err(Error::InvalidConfiguration(format!(
            "Q = {q} must lie in 1..={b}"
        )));
    }
    if demands.len() != plan.users {
        return Err(Error::InvalidConfiguration(format!(
            "expected {} demands, got {}",
            plan.users,
            demands.len()
        )));
    }
    if let Some(&f) = demands.iter().find(|&&f| f >= plan.files) {
        return Err(Error::InvalidConfiguration(format!(
            "demanded file {f} outside the library"
        )));
    }
    let stages = subsets(plan.lambda, plan.coded_caching_gain());
    let rounds = b.div_ceil(q);
    let mut transmissions = Vec::with_capacity(rounds * stages.len());
    for round in 0..rounds {
        let first = round * q;
        let served = q.min(b - first);
        for (stage, &groups) in stages.iter().enumerate() {
            let mut payloads = Vec::with_capacity(groups.len() * served);
            for group in groups.iter() {
                for slot in 0..served {
                    let user = plan.user_at(group, first + slot);
                    let label = SubfileLabel {
                        file: demands[user],
                        subset: groups.without(group),
                    };
                    payloads.push(Payload {
                        group,
                        slot,
                        user,
                        label,
                    });
                }
            }
            transmissions.push(Transmission {
                stage,
                round,
                groups,
                payloads,
            });
        }
    }
    Ok(DeliverySchedule {
        q,
        stages,
        rounds,
        transmissions,
    })
}

/// Problems found by [`verify_delivery`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// A subfile the user needs was never sent.
    Missing { user: usize, label: SubfileLabel },
    /// A subfile was sent to the same user more than once.
    Duplicate { user: usize, label: SubfileLabel },
    /// A subfile was sent that the user neither wants nor lacks.
    Superfluous { user: usize, label: SubfileLabel },
    /// A co-scheduled payload for another group is not in the user's cache.
    Undecodable {
        transmission: usize,
        user: usize,
        interference: SubfileLabel,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Missing { user, label } => {
                write!(f, "user {} never receives subfile {label}", user + 1)
            }
            Violation::Duplicate { user, label } => {
                write!(f, "user {} receives subfile {label} twice", user + 1)
            }
            Violation::Superfluous { user, label } => {
                write!(f, "user {} receives unneeded subfile {label}", user + 1)
            }
            Violation::Undecodable {
                transmission,
                user,
                interference,
            } => write!(
                f,
                "transmission {}: user {} cannot cancel {interference}",
                transmission + 1,
                user + 1
            ),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct DeliveryReport {
    pub violations: Vec<Violation>,
}

impl DeliveryReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks that every user receives each missing piece of its file exactly
/// once and can cancel all other groups' payloads from its cache.
pub fn verify_delivery(
    schedule: &DeliverySchedule,
    plan: &PlacementPlan,
    demands: &[usize],
) -> DeliveryReport {
    let mut report = DeliveryReport::default();
    let mut received: HashMap<(usize, SubfileLabel), usize> = HashMap::new();

    for (idx, tx) in schedule.transmissions.iter().enumerate() {
        for p in &tx.payloads {
            *received.entry((p.user, p.label)).or_default() += 1;
            let state = plan.user_state.get(p.user).copied().unwrap_or(usize::MAX);
            for other in tx.payloads.iter().filter(|o| o.group != p.group) {
                if !plan.state_caches(state, &other.label) {
                    report.violations.push(Violation::Undecodable {
                        transmission: idx,
                        user: p.user,
                        interference: other.label,
                    });
                }
            }
        }
    }

    for (user, &file) in demands.iter().enumerate() {
        let state = plan.user_state[user];
        for &subset in plan.subfile_subsets() {
            if subset.contains(state) {
                continue;
            }
            let label = SubfileLabel { file, subset };
            match received.get(&(user, label)).copied().unwrap_or(0) {
                0 => report.violations.push(Violation::Missing { user, label }),
                1 => {}
                _ => report.violations.push(Violation::Duplicate { user, label }),
            }
        }
    }

    let mut extra: Vec<(usize, SubfileLabel)> = received
        .keys()
        .filter(|(user, label)| {
            demands.get(*user) != Some(&label.file)
                || plan
                    .user_state
                    .get(*user)
                    .is_none_or(|&s| label.subset.contains(s))
                || label.subset.len() != plan.t
        })
        .copied()
        .collect();
    extra.sort();
    report.violations.extend(
        extra
            .into_iter()
            .map(|(user, label)| Violation::Superfluous { user, label }),
    );
    report
}

impl DeliverySchedule {
    /// One line per payload:
    /// `stage <i> round <b> group <ψ> user <k> subfile (<n>,{<T>})`, all 1-based.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for tx in &self.transmissions {
            for p in &tx.payloads {
                out.push_str(&format!(
                    "stage {} round {} group {} user {} subfile {}\n",
                    tx.stage + 1,
                    tx.round + 1,
                    p.group + 1,
                    p.slot + 1,
                    p.label
                ));
            }
        }
        out
    }

    /// Rebuilds a schedule from [`Self::dump`] output. Users are resolved from
    /// (group, round, slot) with the default assignment of `plan`.
    pub fn parse_dump(text: &str, plan: &PlacementPlan, q: usize) -> Result<Self> {
        let bad = |line: usize, what: &str| {
            Error::InvalidConfiguration(format!("schedule dump line {}: {what}", line + 1))
        };
        let stages = subsets(plan.lambda, plan.coded_caching_gain());
        let mut transmissions: Vec<Transmission> = Vec::new();
        let mut rounds = 0;
        for (n, line) in text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty())
        {
            let tokens: Vec<&str> = line.split_whitespace().collect();
            if tokens.len() != 10
                || tokens[0] != "stage"
                || tokens[2] != "round"
                || tokens[4] != "group"
                || tokens[6] != "user"
                || tokens[8] != "subfile"
            {
                return Err(bad(n, "unexpected layout"));
            }
            let num = |i: usize| -> Result<usize> {
                match tokens[i].parse::<usize>() {
                    Ok(v) if v >= 1 => Ok(v - 1),
                    _ => Err(bad(n, "indices are positive integers")),
                }
            };
            let (stage, round, group, slot) = (num(1)?, num(3)?, num(5)?, num(7)?);
            let label = parse_label(tokens[9]).ok_or_else(|| bad(n, "malformed subfile label"))?;
            if stage >= stages.len() || group >= plan.lambda || slot >= q {
                return Err(bad(n, "index out of range"));
            }
            let position = round * q + slot;
            if position >= plan.users_per_state() {
                return Err(bad(n, "round/slot beyond the users of a state"));
            }
            rounds = rounds.max(round + 1);
            let payload = Payload {
                group,
                slot,
                user: plan.user_at(group, position),
                label,
            };
            match transmissions.last_mut() {
                Some(tx) if tx.stage == stage && tx.round == round => tx.payloads.push(payload),
                _ => transmissions.push(Transmission {
                    stage,
                    round,
                    groups: stages[stage],
                    payloads: vec![payload],
                }),
            }
        }
        Ok(Self {
            q,
            stages,
            rounds,
            transmissions,
        })
    }
}

fn parse_label(token: &str) -> Option<SubfileLabel> {
    let inner = token.strip_prefix('(')?.strip_suffix(')')?;
    let (file, set) = inner.split_once(',')?;
    let file: usize = file.parse().ok()?;
    let set = set.strip_prefix('{')?.strip_suffix('}')?;
    let mut subset = GroupSet::EMPTY;
    if !set.is_empty() {
        for g in set.split(',') {
            let g: usize = g.parse().ok()?;
            if g == 0 || g > 63 {
                return None;
            }
            subset = subset.with(g - 1);
        }
    }
    Some(SubfileLabel {
        file: file.checked_sub(1)?,
        subset,
    })
}

/// Largest number of users per group that block diagonalization can serve.
///
/// `antenna_counts[ψ]` lists the receive antennas of the users of group `ψ`
/// in serving order. A group can serve its first `Q` users when, for every
/// one of them, the other `Q−1` users leave at least one transmit dimension,
/// i.e. `Σ_{k≤Q} M_k − min_{k≤Q} M_k ≤ L − 1`. The result is the minimum
/// over groups; with identical `M` it equals `min(⌊(M+L−1)/M⌋, B)`.
pub fn q_max(l: usize, antenna_counts: &[Vec<usize>]) -> usize {
    antenna_counts
        .iter()
        .map(|group| {
            let mut best = 0;
            let mut sum = 0;
            let mut min = usize::MAX;
            for (i, &m) in group.iter().enumerate() {
                sum += m;
                min = min.min(m);
                if sum - min < l {
                    best = i + 1;
                } else {
                    break;
                }
            }
            best
        })
        .min()
        .unwrap_or(0)
}

/// [`q_max`] for `b` users per group, all with `m` antennas.
pub fn q_max_uniform(l: usize, m: usize, b: usize) -> usize {
    ((m + l - 1) / m).min(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn colex_order() {
        let s: Vec<String> = subsets(4, 2).iter().map(|s| s.to_string()).collect();
        assert_eq!(s, ["{1,2}", "{1,3}", "{2,3}", "{1,4}", "{2,4}", "{3,4}"]);
        assert_eq!(subsets(3, 0), vec![GroupSet::EMPTY]);
        assert!(subsets(2, 3).is_empty());
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), 10);
        assert_eq!(binomial(6, 0), 1);
        assert_eq!(binomial(3, 4), 0);
        for n in 0..12 {
            for k in 0..=n {
                assert_eq!(binomial(n, k) as usize, subsets(n, k).len());
            }
        }
    }

    #[test]
    fn placement_five_states() {
        let plan = build_placement(5, 0.2, 10, 10).unwrap();
        assert_eq!(plan.subfile_subsets().len(), 5);
        assert_eq!(plan.coded_caching_gain(), 2);
        assert_eq!(plan.cached_fraction(3), (1, 5));
        assert_eq!(plan.cache_state(0).len(), 10);
    }

    #[test]
    fn placement_without_cache() {
        let plan = build_placement(3, 0.0, 6, 6).unwrap();
        assert_eq!(plan.subfile_subsets(), &[GroupSet::EMPTY]);
        assert_eq!(plan.coded_caching_gain(), 1);
        assert!(plan.cache_state(1).is_empty());
        let sched = build_schedule(&plan, 1, &distinct_demands(6)).unwrap();
        assert_eq!(sched.stages.len(), 3);
        assert!(sched.stages.iter().all(|s| s.len() == 1));
        assert!(verify_delivery(&sched, &plan, &distinct_demands(6)).is_ok());
    }

    #[test]
    fn placement_rejects_bad_parameters() {
        assert!(build_placement(5, 0.3, 10, 10).is_err());
        assert!(build_placement(5, 0.2, 12, 12).is_err());
    }

    #[test]
    fn two_state_example() {
        let plan = build_placement(2, 0.5, 8, 8).unwrap();
        let demands = distinct_demands(8);
        let sched = build_schedule(&plan, 2, &demands).unwrap();
        assert_eq!(sched.stages.len(), 1);
        assert_eq!(sched.rounds, 2);
        assert_eq!(sched.transmissions.len(), 2);
        assert!(verify_delivery(&sched, &plan, &demands).is_ok());
    }

    #[test]
    fn remainder_round() {
        let plan = PlacementPlan::new(3, 1, 15, 15).unwrap();
        let demands = distinct_demands(15);
        let sched = build_schedule(&plan, 2, &demands).unwrap();
        assert_eq!(sched.rounds, 3);
        let last = sched.transmissions.last().unwrap();
        assert_eq!(last.payloads.len(), 2);
        assert!(verify_delivery(&sched, &plan, &demands).is_ok());
    }

    #[test]
    fn deleted_payload_is_reported() {
        let plan = build_placement(5, 0.2, 10, 10).unwrap();
        let demands = distinct_demands(10);
        let mut sched = build_schedule(&plan, 1, &demands).unwrap();
        let removed = sched.transmissions[3].payloads.remove(0);
        let report = verify_delivery(&sched, &plan, &demands);
        assert!(report.violations.contains(&Violation::Missing {
            user: removed.user,
            label: removed.label
        }));
    }

    #[test]
    fn wrong_cache_state_is_reported() {
        let plan = build_placement(4, 0.5, 8, 8).unwrap();
        let demands = distinct_demands(8);
        let sched = build_schedule(&plan, 2, &demands).unwrap();
        let mut bad = plan.clone();
        bad.user_state[0] = 1;
        let report = verify_delivery(&sched, &bad, &demands);
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::Undecodable { user: 0, .. })));
    }

    #[test]
    fn dump_round_trip() {
        let plan = build_placement(4, 0.5, 12, 12).unwrap();
        let sched = build_schedule(&plan, 2, &distinct_demands(12)).unwrap();
        let text = sched.dump();
        assert!(text.starts_with("stage 1 round 1 group 1 user 1 subfile (1,{2,3})\n"));
        let back = DeliverySchedule::parse_dump(&text, &plan, 2).unwrap();
        assert_eq!(back, sched);
        assert!(DeliverySchedule::parse_dump(
            "stage 0 round 1 group 1 user 1 subfile (1,{2})",
            &plan,
            2
        )
        .is_err());
    }

    #[test]
    fn q_max_examples() {
        assert_eq!(q_max_uniform(32, 4, 8), 8);
        assert_eq!(q_max_uniform(32, 4, 100), 8);
        assert_eq!(q_max_uniform(2, 1, 5), 2);
        assert_eq!(q_max_uniform(6, 6, 5), 1);
        assert_eq!(q_max(32, &[vec![4; 10], vec![4; 10]]), 8);
        assert_eq!(q_max(6, &[vec![6, 6]]), 1);
        // 3 + 2 + 1 − 1 = 5 ≤ 5, adding another 1 would leave 6 > 5.
        assert_eq!(q_max(6, &[vec![3, 2, 1, 1], vec![1; 10]]), 3);
    }
}
