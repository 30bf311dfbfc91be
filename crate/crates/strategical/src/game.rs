//! Discounted infinitely repeated games over a move alphabet.
//!
//! Payoffs of lasso matches are evaluated in closed form. A match is good for
//! a player when no single deviation followed by an optimal continuation
//! inside the ambient language pays more; the optimal continuation values are
//! computed by value iteration, which is exact for discounted control on a
//! finite graph up to the requested tolerance. Nash equilibria are verified
//! by checking one match against every player's deviations.

use std::sync::Arc;

use num::rational::BigRational;
use num::{One, Signed, ToPrimitive, Zero};

use crate::alphabet::{assert_same_alphabet, MoveAlphabet, MoveLetter};
use crate::automata::{equivalent, SafetyAutomaton};
use crate::error::{Error, Result};
use crate::strategy::{MemoryStrategy, ProductStrategyVector};
use crate::words::LassoWord;

/// A normal-form stage game: one rational utility per player per move.
#[derive(Debug, Clone)]
pub struct Game {
    alphabet: Arc<MoveAlphabet>,
    player_names: Vec<String>,
    /// utilities[letter][player]
    utilities: Vec<Vec<BigRational>>,
    utilities_f64: Vec<Vec<f64>>,
}

impl Game {
    pub fn new(
        alphabet: Arc<MoveAlphabet>,
        player_names: Vec<String>,
        utilities: Vec<Vec<BigRational>>,
    ) -> Result<Game> {
        if player_names.len() != alphabet.player_count() {
            return Err(Error::InvalidParameter(
                "one player name per player is required".into(),
            ));
        }
        if utilities.len() != alphabet.len()
            || utilities.iter().any(|row| row.len() != alphabet.player_count())
        {
            return Err(Error::InvalidParameter(
                "the utility table must cover every move letter".into(),
            ));
        }
        let utilities_f64 = utilities
            .iter()
            .map(|row| row.iter().map(|v| v.to_f64().unwrap_or(f64::NAN)).collect())
            .collect();
        Ok(Game {
            alphabet,
            player_names,
            utilities,
            utilities_f64,
        })
    }

    pub fn alphabet(&self) -> &Arc<MoveAlphabet> {
        &self.alphabet
    }

    pub fn player_count(&self) -> usize {
        self.alphabet.player_count()
    }

    pub fn player_name(&self, player: usize) -> &str {
        &self.player_names[player]
    }

    pub fn utility(&self, letter: MoveLetter, player: usize) -> &BigRational {
        &self.utilities[letter.index()][player]
    }

    pub fn utility_f64(&self, letter: MoveLetter, player: usize) -> f64 {
        self.utilities_f64[letter.index()][player]
    }

    /// The discounted payoff vector of a lasso match, in closed form:
    /// `(1-d) [ sum_{k<|u|} pi(u_k) d^k + d^|u| (1-d^|v|)^-1 sum_{k<|v|} pi(v_k) d^k ]`.
    ///
    /// Computed exactly when the discount factor is rational, and in floating
    /// point otherwise.
    pub fn discounted_payoff(&self, delta: &DiscountFactor, h: &LassoWord) -> Vec<Payoff> {
        (0..self.player_count())
            .map(|player| {
                let value = self.payoff_f64(delta.value(), player, h);
                let exact = delta.exact().map(|d| self.payoff_exact(d, player, h));
                Payoff { exact, value }
            })
            .collect()
    }

    /// Closed-form payoff for one player in floating point.
    pub fn payoff_f64(&self, delta: f64, player: usize, h: &LassoWord) -> f64 {
        let mut stem_sum = 0.0;
        let mut pow = 1.0;
        for &a in h.stem().letters() {
            stem_sum += self.utility_f64(a, player) * pow;
            pow *= delta;
        }
        // pow is now delta^|stem|
        let mut cycle_sum = 0.0;
        let mut cycle_pow = 1.0;
        for &a in h.cycle().letters() {
            cycle_sum += self.utility_f64(a, player) * cycle_pow;
            cycle_pow *= delta;
        }
        // cycle_pow is delta^|cycle|
        (1.0 - delta) * (stem_sum + pow * cycle_sum / (1.0 - cycle_pow))
    }

    fn payoff_exact(&self, delta: &BigRational, player: usize, h: &LassoWord) -> BigRational {
        let one = BigRational::one();
        let mut stem_sum = BigRational::zero();
        let mut pow = BigRational::one();
        for &a in h.stem().letters() {
            stem_sum += self.utility(a, player) * &pow;
            pow *= delta;
        }
        let mut cycle_sum = BigRational::zero();
        let mut cycle_pow = BigRational::one();
        for &a in h.cycle().letters() {
            cycle_sum += self.utility(a, player) * &cycle_pow;
            cycle_pow *= delta;
        }
        (&one - delta) * (stem_sum + pow * cycle_sum / (&one - &cycle_pow))
    }

    /// Largest absolute stage utility of one player.
    pub fn max_abs_utility(&self, player: usize) -> f64 {
        self.utilities
            .iter()
            .map(|row| row[player].abs())
            .max()
            .and_then(|v| v.to_f64())
            .unwrap_or(0.0)
    }
}

/// Discount factor strictly between 0 and 1, kept exact when given as a
/// rational.
#[derive(Debug, Clone)]
pub struct DiscountFactor {
    exact: Option<BigRational>,
    value: f64,
}

impl DiscountFactor {
    pub fn from_rational(r: BigRational) -> Result<DiscountFactor> {
        if r <= BigRational::zero() || r >= BigRational::one() {
            return Err(Error::InvalidParameter(
                "discount factor must lie strictly between 0 and 1".into(),
            ));
        }
        let value = r.to_f64().expect("rational in (0,1) fits in f64");
        Ok(DiscountFactor {
            exact: Some(r),
            value,
        })
    }

    pub fn from_f64(value: f64) -> Result<DiscountFactor> {
        if !(value > 0.0 && value < 1.0) {
            return Err(Error::InvalidParameter(
                "discount factor must lie strictly between 0 and 1".into(),
            ));
        }
        Ok(DiscountFactor { exact: None, value })
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn exact(&self) -> Option<&BigRational> {
        self.exact.as_ref()
    }
}

/// One player's payoff; `exact` is present when the discount factor was
/// rational.
#[derive(Debug, Clone)]
pub struct Payoff {
    pub exact: Option<BigRational>,
    pub value: f64,
}

/// The languages entering the equilibrium definition for a product vector:
/// `whole` is the generated language X, `per_player[i]` the language where
/// only player i follows the vector, and `opponents[i]` the one where
/// everyone except player i does.
#[derive(Debug, Clone)]
pub struct EquilibriumFamily {
    pub whole: SafetyAutomaton,
    pub per_player: Vec<SafetyAutomaton>,
    pub opponents: Vec<SafetyAutomaton>,
}

/// Builds the family and verifies the product identities
/// `X = meet of the X_i` and `Y_i = meet of the X_j, j != i` by language
/// equivalence. A failed identity indicates a bug, not bad input.
pub fn equilibrium_family(sigma: &ProductStrategyVector) -> Result<EquilibriumFamily> {
    let n = sigma.player_count();
    if n < 2 {
        return Err(Error::SinglePlayerEquilibrium);
    }
    let whole = sigma.gamma();
    let per_player: Vec<SafetyAutomaton> =
        (0..n).map(|i| sigma.isolate_player(i).gamma()).collect();
    let opponents: Vec<SafetyAutomaton> = (0..n).map(|i| sigma.free_player(i).gamma()).collect();

    let meet_all = per_player
        .iter()
        .skip(1)
        .fold(per_player[0].clone(), |acc, x| acc.intersect(x));
    if !equivalent(&meet_all.to_buchi(), &whole.to_buchi()) {
        return Err(Error::Internal(
            "per-player languages do not intersect to the generated language".into(),
        ));
    }
    for i in 0..n {
        let others: Vec<&SafetyAutomaton> = (0..n)
            .filter(|&j| j != i)
            .map(|j| &per_player[j])
            .collect();
        let meet = others[1..]
            .iter()
            .fold((*others[0]).clone(), |acc, x| acc.intersect(x));
        if !equivalent(&meet.to_buchi(), &opponents[i].to_buchi()) {
            return Err(Error::Internal(format!(
                "opponent language of player {} fails the intersection identity",
                i + 1
            )));
        }
    }
    Ok(EquilibriumFamily {
        whole,
        per_player,
        opponents,
    })
}

/// Optimal discounted continuation value per state of a trim safety
/// automaton, for one player: `V(q) = max over available moves a of
/// (1-d) pi(a) + d V(q.a)`.
///
/// Iterates until the sup-norm step is at most `tol (1-d) / (2d)`, which
/// bounds the true error by `tol`.
pub fn best_deviation_value(
    ambient: &SafetyAutomaton,
    game: &Game,
    player: usize,
    delta: f64,
    tol: f64,
) -> Result<Vec<f64>> {
    assert_same_alphabet(ambient.alphabet(), game.alphabet());
    if ambient.is_void() {
        return Err(Error::EmptyAutomaton);
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidParameter(
            "discount factor must lie strictly between 0 and 1".into(),
        ));
    }
    if tol <= 0.0 {
        return Err(Error::InvalidParameter("tolerance must be positive".into()));
    }
    let n = ambient.state_count();
    let threshold = tol * (1.0 - delta) / (2.0 * delta);
    let mut values = vec![0.0f64; n];
    loop {
        let mut next = vec![f64::NEG_INFINITY; n];
        for q in 0..n {
            for (a, r) in ambient.available(q) {
                let candidate = (1.0 - delta) * game.utility_f64(a, player) + delta * values[r];
                if candidate > next[q] {
                    next[q] = candidate;
                }
            }
        }
        let step = values
            .iter()
            .zip(&next)
            .map(|(old, new)| (new - old).abs())
            .fold(0.0f64, f64::max);
        values = next;
        if step <= threshold {
            return Ok(values);
        }
    }
}

/// The greedy policy of the value function: per state, the maximizing move.
fn greedy_policy(
    ambient: &SafetyAutomaton,
    game: &Game,
    player: usize,
    delta: f64,
    values: &[f64],
) -> Vec<(MoveLetter, usize)> {
    (0..ambient.state_count())
        .map(|q| {
            ambient
                .available(q)
                .map(|(a, r)| {
                    let v = (1.0 - delta) * game.utility_f64(a, player) + delta * values[r];
                    (a, r, v)
                })
                .max_by(|x, y| x.2.total_cmp(&y.2))
                .map(|(a, r, _)| (a, r))
                .expect("trim automaton state has a successor")
        })
        .collect()
}

/// Assessment of the best single deviation available at one position of a
/// match.
#[derive(Debug, Clone)]
pub struct DeviationAssessment {
    /// The deviating letter: the on-path move with this player's component
    /// replaced.
    pub letter: MoveLetter,
    /// Normalized continuation value of the match from this position.
    pub continuation: f64,
    /// Value of deviating now and continuing optimally inside the ambient
    /// language.
    pub best_deviation: f64,
    /// `continuation - best_deviation`; negative means the deviation pays.
    pub margin: f64,
}

/// One walked position of a good-match check.
#[derive(Debug, Clone)]
pub struct MatchStep {
    pub time: usize,
    pub state: usize,
    /// `None` when the player has no feasible deviation at this position.
    pub deviation: Option<DeviationAssessment>,
}

/// Verdict of a good-match check for one player.
#[derive(Debug, Clone)]
pub struct GoodMatchReport {
    pub good: bool,
    /// The worst margin lies within the tolerance of zero.
    pub boundary: bool,
    pub tolerance: f64,
    /// One entry per position until the (lasso phase, state) pair repeats;
    /// later positions duplicate earlier ones.
    pub steps: Vec<MatchStep>,
    /// Index into `steps` where the repetition returns.
    pub loop_start: usize,
    /// Index into `steps` of the worst margin, if any deviation was feasible.
    pub worst: Option<usize>,
}

impl GoodMatchReport {
    /// The step governing an arbitrary position, unfolding the eventual loop.
    pub fn step_at_time(&self, t: usize) -> &MatchStep {
        if t < self.steps.len() {
            &self.steps[t]
        } else {
            let period = self.steps.len() - self.loop_start;
            &self.steps[self.loop_start + (t - self.loop_start) % period]
        }
    }

    /// Normalized deviation margin at a position, `None` when no deviation is
    /// feasible there.
    pub fn margin_at_time(&self, t: usize) -> Option<f64> {
        self.step_at_time(t).deviation.as_ref().map(|d| d.margin)
    }

    pub fn worst_margin(&self) -> Option<f64> {
        self.worst
            .and_then(|i| self.steps[i].deviation.as_ref())
            .map(|d| d.margin)
    }
}

/// Checks whether `h` is a good match for `player` inside the ambient closed
/// language: at every position, deviating in this player's component alone
/// and then playing optimally must not beat staying on the path, up to `tol`.
///
/// Positions are walked until the (lasso phase, automaton state) pair
/// repeats; both compared values depend only on that pair, so later positions
/// duplicate earlier comparisons.
pub fn is_good_match(
    h: &LassoWord,
    ambient: &SafetyAutomaton,
    game: &Game,
    player: usize,
    delta: f64,
    tol: f64,
) -> Result<GoodMatchReport> {
    assert_same_alphabet(ambient.alphabet(), game.alphabet());
    if !ambient.accepts(h) {
        return Err(Error::MatchOutsideLanguage);
    }
    let vi_tol = (tol * 1e-3).min(1e-12);
    let values = best_deviation_value(ambient, game, player, delta, vi_tol)?;
    let alphabet = game.alphabet();

    let stem_len = h.stem().len();
    let cycle_len = h.cycle().len();
    let mut seen = std::collections::HashMap::new();
    let mut steps: Vec<MatchStep> = Vec::new();
    let mut state = ambient.initial().expect("nonempty ambient");
    let loop_start;
    let mut t = 0usize;
    loop {
        let phase = if t < stem_len {
            t
        } else {
            stem_len + (t - stem_len) % cycle_len
        };
        if let Some(&t0) = seen.get(&(phase, state)) {
            loop_start = t0;
            break;
        }
        seen.insert((phase, state), t);

        let on_path = h.letter_at(t);
        let own = alphabet.component(on_path, player);
        let deviation = (0..alphabet.action_count(player))
            .filter(|&b| b != own)
            .filter_map(|b| {
                let letter = alphabet.replace_component(on_path, player, b);
                ambient.transition(state, letter).map(|r| {
                    let value =
                        (1.0 - delta) * game.utility_f64(letter, player) + delta * values[r];
                    (letter, value)
                })
            })
            .max_by(|x, y| x.1.total_cmp(&y.1))
            .map(|(letter, best_deviation)| {
                let continuation = game.payoff_f64(delta, player, &h.suffix(t));
                DeviationAssessment {
                    letter,
                    continuation,
                    best_deviation,
                    margin: continuation - best_deviation,
                }
            });
        steps.push(MatchStep {
            time: t,
            state,
            deviation,
        });
        state = ambient
            .transition(state, on_path)
            .expect("membership was checked");
        t += 1;
    }

    let worst = steps
        .iter()
        .enumerate()
        .filter_map(|(i, s)| s.deviation.as_ref().map(|d| (i, d.margin)))
        .min_by(|x, y| x.1.total_cmp(&y.1))
        .map(|(i, _)| i);
    let worst_margin = worst.and_then(|i| steps[i].deviation.as_ref().map(|d| d.margin));
    let good = worst_margin.is_none_or(|m| m >= -tol);
    let boundary = worst_margin.is_some_and(|m| m.abs() <= tol);
    Ok(GoodMatchReport {
        good,
        boundary,
        tolerance: tol,
        steps,
        loop_start,
        worst,
    })
}

/// Realizes a deviation as an actual match: follows `h` up to `time`, plays
/// `letter`, then follows the greedy optimal policy until the state repeats.
/// The result is a member of the ambient language.
pub fn realize_deviation(
    h: &LassoWord,
    ambient: &SafetyAutomaton,
    game: &Game,
    player: usize,
    delta: f64,
    time: usize,
    letter: MoveLetter,
) -> Result<LassoWord> {
    if !ambient.accepts(h) {
        return Err(Error::MatchOutsideLanguage);
    }
    let values = best_deviation_value(ambient, game, player, delta, 1e-12)?;
    let policy = greedy_policy(ambient, game, player, delta, &values);
    let mut letters: Vec<MoveLetter> = h.prefix(time).letters().to_vec();
    let mut state = ambient
        .run(&h.prefix(time))
        .expect("prefix of a member stays in the domain");
    state = ambient
        .transition(state, letter)
        .ok_or(Error::InvalidParameter(
            "deviation letter is not available at this position".into(),
        ))?;
    letters.push(letter);
    let mut visited_at = std::collections::HashMap::new();
    loop {
        if let Some(&j) = visited_at.get(&state) {
            let stem = crate::words::FiniteWord::new(letters[..j].to_vec());
            let cycle = crate::words::FiniteWord::new(letters[j..].to_vec());
            return Ok(LassoWord::new(stem, cycle));
        }
        visited_at.insert(state, letters.len());
        let (a, r) = policy[state];
        letters.push(a);
        state = r;
    }
}

/// Outcome of a Nash verification.
#[derive(Debug, Clone)]
pub enum NashOutcome {
    /// Some match is simultaneously good for every player against the
    /// opponents' faithful play.
    Equilibrium { witness: LassoWord },
    /// The supplied candidate lies outside some opponent language.
    CandidateOutside { player: usize },
    /// The supplied candidate admits a profitable deviation.
    CandidateRejected {
        player: usize,
        report: GoodMatchReport,
    },
    /// No witness found among the lassos searched; not a proof of absence.
    Inconclusive { bound: usize, examined: usize },
}

impl NashOutcome {
    pub fn is_equilibrium(&self) -> bool {
        matches!(self, NashOutcome::Equilibrium { .. })
    }
}

/// Verifies the equilibrium condition for a product vector.
///
/// With a candidate match: checks that the candidate belongs to every
/// opponent language and is good for every player. Without one: searches the
/// generated language for a witness among all lassos realizable within
/// `search_bound` letters; exhausting the bound is inconclusive, not a
/// refutation.
pub fn is_nash(
    sigma: &ProductStrategyVector,
    game: &Game,
    delta: f64,
    tol: f64,
    search_bound: usize,
    candidate: Option<&LassoWord>,
) -> Result<NashOutcome> {
    assert_same_alphabet(sigma.alphabet(), game.alphabet());
    let family = equilibrium_family(sigma)?;
    match candidate {
        Some(h) => check_candidate(&family, game, delta, tol, h),
        None => {
            let candidates = family.whole.enumerate_lassos(search_bound);
            let examined = candidates.len();
            for h in &candidates {
                if let NashOutcome::Equilibrium { witness } =
                    check_candidate(&family, game, delta, tol, h)?
                {
                    return Ok(NashOutcome::Equilibrium { witness });
                }
            }
            Ok(NashOutcome::Inconclusive {
                bound: search_bound,
                examined,
            })
        }
    }
}

fn check_candidate(
    family: &EquilibriumFamily,
    game: &Game,
    delta: f64,
    tol: f64,
    h: &LassoWord,
) -> Result<NashOutcome> {
    for (player, ambient) in family.opponents.iter().enumerate() {
        if !ambient.accepts(h) {
            return Ok(NashOutcome::CandidateOutside { player });
        }
        let report = is_good_match(h, ambient, game, player, delta, tol)?;
        if !report.good {
            return Ok(NashOutcome::CandidateRejected { player, report });
        }
    }
    Ok(NashOutcome::Equilibrium { witness: h.clone() })
}

/// A sign change of the equilibrium margin between two discount factors,
/// bracketed to the requested width.
#[derive(Debug, Clone)]
pub struct ThresholdCrossing {
    pub lower: f64,
    pub upper: f64,
    pub good_below: bool,
    pub good_above: bool,
}

impl ThresholdCrossing {
    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lower + self.upper)
    }
}

/// Result of a threshold scan over the discount factor.
#[derive(Debug, Clone)]
pub struct ThresholdReport {
    pub crossings: Vec<ThresholdCrossing>,
    pub grid_step: f64,
    pub tolerance: f64,
    /// The predicate held at every grid point.
    pub all_good: bool,
    /// The predicate failed at every grid point.
    pub none_good: bool,
}

const THRESHOLD_GRID: usize = 64;

/// Scans the all-players good-match predicate of one candidate over a grid of
/// discount factors (step 1/64) and bisects every sign change to width at
/// most `tol`. Monotonicity is not assumed; every crossing is reported.
pub fn nash_threshold(
    sigma: &ProductStrategyVector,
    game: &Game,
    candidate: &LassoWord,
    tol: f64,
) -> Result<ThresholdReport> {
    assert_same_alphabet(sigma.alphabet(), game.alphabet());
    let family = equilibrium_family(sigma)?;
    for ambient in &family.opponents {
        if !ambient.accepts(candidate) {
            return Err(Error::MatchOutsideLanguage);
        }
    }
    threshold_scan(tol, |delta| {
        let mut min_margin = f64::INFINITY;
        for (player, ambient) in family.opponents.iter().enumerate() {
            let report = is_good_match(candidate, ambient, game, player, delta, 1e-9)?;
            if let Some(m) = report.worst_margin() {
                min_margin = min_margin.min(m);
            }
        }
        Ok(min_margin)
    })
}

/// Threshold scan of the single-player good-match predicate inside a fixed
/// ambient language.
pub fn good_match_threshold(
    ambient: &SafetyAutomaton,
    game: &Game,
    player: usize,
    candidate: &LassoWord,
    tol: f64,
) -> Result<ThresholdReport> {
    if !ambient.accepts(candidate) {
        return Err(Error::MatchOutsideLanguage);
    }
    threshold_scan(tol, |delta| {
        let report = is_good_match(candidate, ambient, game, player, delta, 1e-9)?;
        Ok(report.worst_margin().unwrap_or(f64::INFINITY))
    })
}

fn threshold_scan(
    tol: f64,
    margin: impl Fn(f64) -> Result<f64>,
) -> Result<ThresholdReport> {
    if tol <= 0.0 {
        return Err(Error::InvalidParameter("tolerance must be positive".into()));
    }
    let grid_step = 1.0 / THRESHOLD_GRID as f64;
    let points: Vec<f64> = (1..THRESHOLD_GRID)
        .map(|k| k as f64 * grid_step)
        .collect();
    let mut signs: Vec<bool> = Vec::with_capacity(points.len());
    for &d in &points {
        signs.push(margin(d)? >= 0.0);
    }
    let mut crossings = Vec::new();
    for i in 0..points.len() - 1 {
        if signs[i] == signs[i + 1] {
            continue;
        }
        let (mut lo, mut hi) = (points[i], points[i + 1]);
        let lo_sign = signs[i];
        while hi - lo > tol {
            let mid = 0.5 * (lo + hi);
            if (margin(mid)? >= 0.0) == lo_sign {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        crossings.push(ThresholdCrossing {
            lower: lo,
            upper: hi,
            good_below: signs[i],
            good_above: signs[i + 1],
        });
    }
    Ok(ThresholdReport {
        crossings,
        grid_step,
        tolerance: tol,
        all_good: signs.iter().all(|&s| s),
        none_good: signs.iter().all(|&s| !s),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::contains;
    use crate::presets;
    use crate::words::FiniteWord;
    use num::BigInt;

    /// Exact rational `1 + d^(n+1) (5d - 1)` for the deviation-family tests.
    fn pd_rejoin_value(delta: &BigRational, n: usize) -> BigRational {
        let one = BigRational::one();
        let five = BigRational::new(BigInt::from(5), BigInt::one());
        let mut pow = BigRational::one();
        for _ in 0..n + 1 {
            pow *= delta;
        }
        one.clone() + pow * (five * delta - one)
    }

    fn letter(alpha: &Arc<MoveAlphabet>, text: &str) -> MoveLetter {
        let comps: Vec<usize> = text
            .split(',')
            .enumerate()
            .map(|(p, name)| alpha.action_by_name(p, name).unwrap())
            .collect();
        alpha.letter(&comps)
    }

    fn word(alpha: &Arc<MoveAlphabet>, text: &str) -> FiniteWord {
        if text.is_empty() {
            return FiniteWord::empty();
        }
        text.split_whitespace().map(|t| letter(alpha, t)).collect()
    }

    fn lasso(alpha: &Arc<MoveAlphabet>, stem: &str, cycle: &str) -> LassoWord {
        LassoWord::new(word(alpha, stem), word(alpha, cycle))
    }

    fn rational(p: i64, q: i64) -> BigRational {
        BigRational::new(BigInt::from(p), BigInt::from(q))
    }

    #[test]
    fn constant_cooperation_pays_the_stage_value() {
        let game = presets::prisoners_dilemma();
        let alpha = game.alphabet().clone();
        let h = lasso(&alpha, "", "c,c");
        for delta in [rational(1, 10), rational(1, 2), rational(9, 10)] {
            let d = DiscountFactor::from_rational(delta).unwrap();
            let payoffs = game.discounted_payoff(&d, &h);
            for p in payoffs {
                assert_eq!(p.exact.unwrap(), rational(4, 1));
                assert!((p.value - 4.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn rejoin_family_matches_the_closed_form() {
        // Defect together for n+1 rounds, rejoin with (d,c), then (c,d)
        // forever: player 2 earns 1 + d^(n+1) (5d - 1), exactly.
        let game = presets::prisoners_dilemma();
        let alpha = game.alphabet().clone();
        for n in 0..6 {
            let stem_text = "d,d ".repeat(n + 1) + "d,c";
            let h = lasso(&alpha, &stem_text, "c,d");
            for (p, q) in [(1, 10), (1, 5), (1, 4), (1, 2), (9, 10)] {
                let delta = rational(p, q);
                let d = DiscountFactor::from_rational(delta.clone()).unwrap();
                let payoff = &game.discounted_payoff(&d, &h)[1];
                assert_eq!(
                    payoff.exact.clone().unwrap(),
                    pd_rejoin_value(&delta, n),
                    "n={n} delta={p}/{q}"
                );
            }
        }
    }

    #[test]
    fn truncated_series_oracle() {
        // (d,d)(d,c)(c,d)^w at delta=1/2 pays 1.75 for player 2; the closed
        // form must agree with a 200-term partial sum.
        let game = presets::prisoners_dilemma();
        let alpha = game.alphabet().clone();
        let h = lasso(&alpha, "d,d d,c", "c,d");
        let delta = 0.5;
        let closed = game.payoff_f64(delta, 1, &h);
        assert!((closed - 1.75).abs() < 1e-12);
        let mut series = 0.0;
        let mut pow = 1.0;
        for k in 0..200 {
            series += game.utility_f64(h.letter_at(k), 1) * pow;
            pow *= delta;
        }
        series *= 1.0 - delta;
        assert!((closed - series).abs() < 1e-9);
    }

    #[test]
    fn single_state_deviation_value() {
        // All four moves available forever: the best reply value for player 2
        // is the maximal stage payoff, 5.
        let game = presets::prisoners_dilemma();
        let alpha = game.alphabet().clone();
        let mut b = crate::automata::AutomatonBuilder::new(alpha.clone(), 1);
        for l in alpha.letters() {
            b.add(0, l, 0).unwrap();
        }
        let y = b.into_safety();
        for delta in [0.1, 0.5, 0.9] {
            let v = best_deviation_value(&y, &game, 1, delta, 1e-10).unwrap();
            assert!((v[0] - 5.0).abs() < 1e-9, "delta={delta}");
        }
    }

    #[test]
    fn forced_defection_deviation_value() {
        // Player 1 pinned to d, player 2 free: defecting dominates, value 1.
        let game = presets::prisoners_dilemma();
        let alpha = game.alphabet().clone();
        let mut b = crate::automata::AutomatonBuilder::new(alpha.clone(), 1);
        b.add(0, letter(&alpha, "d,c"), 0).unwrap();
        b.add(0, letter(&alpha, "d,d"), 0).unwrap();
        let y = b.into_safety();
        for delta in [0.2, 0.5, 0.8] {
            let v = best_deviation_value(&y, &game, 1, delta, 1e-10).unwrap();
            assert!((v[0] - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn value_iteration_rejects_empty_ambient() {
        let game = presets::prisoners_dilemma();
        let empty = SafetyAutomaton::empty(game.alphabet().clone());
        assert!(matches!(
            best_deviation_value(&empty, &game, 0, 0.5, 1e-9),
            Err(Error::EmptyAutomaton)
        ));
    }

    #[test]
    fn matches_without_variations_are_good() {
        // In (c,c)^w + (d,d)^w neither member admits any deviation staying in
        // the language, so both are good for both players at any discount.
        let game = presets::prisoners_dilemma();
        let alpha = game.alphabet().clone();
        let mut b = crate::automata::AutomatonBuilder::new(alpha.clone(), 3);
        b.add(0, letter(&alpha, "c,c"), 1).unwrap();
        b.add(0, letter(&alpha, "d,d"), 2).unwrap();
        b.add(1, letter(&alpha, "c,c"), 1).unwrap();
        b.add(2, letter(&alpha, "d,d"), 2).unwrap();
        let l = b.into_safety();
        for h in [lasso(&alpha, "", "c,c"), lasso(&alpha, "", "d,d")] {
            for player in 0..2 {
                for delta in [0.1, 0.5, 0.9] {
                    let report =
                        is_good_match(&h, &l, &game, player, delta, 1e-9).unwrap();
                    assert!(report.good);
                    assert!(report.worst.is_none());
                }
            }
        }
    }

    #[test]
    fn rejoining_is_good_only_when_patient() {
        // Ambient: player 1 defects until player 2 cooperates, then
        // cooperates forever. Deviating off (d,c)(c,d)^w pays for player 2
        // exactly when the discount factor is below 1/5.
        let game = presets::prisoners_dilemma();
        let alpha = game.alphabet().clone();
        let l = presets::defect_until_cooperation();
        let h = lasso(&alpha, "d,c", "c,d");
        for (delta, expect_good) in [(0.3, true), (0.21, true), (0.19, false), (0.1, false)] {
            let report = is_good_match(&h, &l, &game, 1, delta, 1e-9).unwrap();
            assert_eq!(report.good, expect_good, "delta={delta}");
        }
        // The all-defection match is good for player 2 at small discounts.
        let dd = lasso(&alpha, "", "d,d");
        let report = is_good_match(&dd, &l, &game, 1, 0.1, 1e-9).unwrap();
        assert!(report.good);
        // At the boundary the margin vanishes within tolerance.
        let report = is_good_match(&h, &l, &game, 1, 0.2, 1e-9).unwrap();
        assert!(report.boundary);
    }

    #[test]
    fn bad_verdicts_self_validate() {
        // Whenever a deviation is reported profitable, realizing it greedily
        // must produce a member of the ambient language that actually pays
        // more.
        let game = presets::prisoners_dilemma();
        let alpha = game.alphabet().clone();
        let l = presets::defect_until_cooperation();
        let h = lasso(&alpha, "d,c", "c,d");
        let delta = 0.1;
        let report = is_good_match(&h, &l, &game, 1, delta, 1e-9).unwrap();
        assert!(!report.good);
        let worst = &report.steps[report.worst.unwrap()];
        let assessment = worst.deviation.as_ref().unwrap();
        let realized = realize_deviation(
            &h,
            &l,
            &game,
            1,
            delta,
            worst.time,
            assessment.letter,
        )
        .unwrap();
        assert!(l.accepts(&realized));
        let on_path = game.payoff_f64(delta, 1, &h);
        let deviated = game.payoff_f64(delta, 1, &realized);
        assert!(deviated > on_path);
    }

    #[test]
    fn grim_profile_margins_match_the_closed_form() {
        // Both players grim: deviating from (c,c)^w at position k changes the
        // discounted payoff by exactly d^k (4d - 1).
        let game = presets::prisoners_dilemma();
        let alpha = game.alphabet().clone();
        let family = equilibrium_family(&presets::grim_trigger_both()).unwrap();
        let h = lasso(&alpha, "", "c,c");
        for delta in [0.1, 0.2, 0.25, 0.3, 0.5, 0.9] {
            for player in 0..2 {
                let report =
                    is_good_match(&h, &family.opponents[player], &game, player, delta, 1e-9)
                        .unwrap();
                for k in 0..3 {
                    let normalized = report.margin_at_time(k).unwrap();
                    let absolute = delta.powi(k as i32) * normalized;
                    let expected = delta.powi(k as i32) * (4.0 * delta - 1.0);
                    assert!(
                        (absolute - expected).abs() < 1e-9,
                        "delta={delta} player={player} k={k}"
                    );
                }
            }
        }
    }

    #[test]
    fn grim_profile_equilibrium_verdicts() {
        let game = presets::prisoners_dilemma();
        let alpha = game.alphabet().clone();
        let sigma = presets::grim_trigger_both();
        let candidate = lasso(&alpha, "", "c,c");
        // Patient players: equilibrium, witnessed by eternal cooperation.
        let outcome = is_nash(&sigma, &game, 0.3, 1e-9, 6, None).unwrap();
        match outcome {
            NashOutcome::Equilibrium { witness } => {
                assert!(witness.same_word(&candidate));
            }
            other => panic!("expected equilibrium, got {other:?}"),
        }
        // Impatient players: the candidate is rejected, player 1 first.
        let outcome = is_nash(&sigma, &game, 0.2, 1e-9, 6, Some(&candidate)).unwrap();
        match outcome {
            NashOutcome::CandidateRejected { player, report } => {
                assert_eq!(player, 0);
                let m = report.worst_margin().unwrap();
                assert!((m - (4.0 * 0.2 - 1.0)).abs() < 1e-9);
            }
            other => panic!("expected rejection, got {other:?}"),
        }
    }

    #[test]
    fn always_defecting_is_an_equilibrium_at_any_discount() {
        let game = presets::prisoners_dilemma();
        let alpha = game.alphabet().clone();
        let sigma = presets::always_defect();
        for delta in [0.05, 0.3, 0.7, 0.95] {
            let outcome = is_nash(&sigma, &game, delta, 1e-9, 4, None).unwrap();
            match outcome {
                NashOutcome::Equilibrium { witness } => {
                    assert!(witness.same_word(&lasso(&alpha, "", "d,d")));
                }
                other => panic!("delta={delta}: expected equilibrium, got {other:?}"),
            }
        }
    }

    #[test]
    fn grim_threshold_is_one_quarter() {
        let game = presets::prisoners_dilemma();
        let alpha = game.alphabet().clone();
        let sigma = presets::grim_trigger_both();
        let candidate = lasso(&alpha, "", "c,c");
        let report = nash_threshold(&sigma, &game, &candidate, 1e-6).unwrap();
        assert_eq!(report.crossings.len(), 1);
        let crossing = &report.crossings[0];
        assert!(!crossing.good_below && crossing.good_above);
        assert!((crossing.midpoint() - 0.25).abs() < 1e-6);
    }

    #[test]
    fn rejoin_threshold_is_one_fifth() {
        let game = presets::prisoners_dilemma();
        let alpha = game.alphabet().clone();
        let l = presets::defect_until_cooperation();
        let candidate = lasso(&alpha, "d,c", "c,d");
        let report = good_match_threshold(&l, &game, 1, &candidate, 1e-6).unwrap();
        assert_eq!(report.crossings.len(), 1);
        assert!((report.crossings[0].midpoint() - 0.2).abs() < 1e-6);
    }

    #[test]
    fn defect_forever_has_no_threshold() {
        let game = presets::prisoners_dilemma();
        let alpha = game.alphabet().clone();
        let sigma = presets::always_defect();
        let candidate = lasso(&alpha, "", "d,d");
        let report = nash_threshold(&sigma, &game, &candidate, 1e-6).unwrap();
        assert!(report.crossings.is_empty());
        assert!(report.all_good);
    }

    #[test]
    fn single_player_equilibrium_queries_are_rejected() {
        let alpha = MoveAlphabet::single_player(vec!["a", "b"]).unwrap();
        let game = Game::new(
            alpha.clone(),
            vec!["solo".into()],
            vec![vec![rational(1, 1)], vec![rational(0, 1)]],
        )
        .unwrap();
        let sigma = ProductStrategyVector::unpredictable(alpha.clone());
        let h = lasso(&alpha, "", "a");
        // Single-player letters have no comma; build the lasso manually.
        let _ = h;
        let a = alpha.letter(&[0]);
        let h = LassoWord::periodic(FiniteWord::new(vec![a]));
        assert!(matches!(
            is_nash(&sigma, &game, 0.5, 1e-9, 4, Some(&h)),
            Err(Error::SinglePlayerEquilibrium)
        ));
    }

    #[test]
    fn family_of_unpredictable_players_is_universal() {
        let alpha = presets::prisoners_dilemma().alphabet().clone();
        let sigma = ProductStrategyVector::unpredictable(alpha.clone());
        let family = equilibrium_family(&sigma).unwrap();
        for cycle in ["c,c", "c,d", "d,c", "d,d"] {
            let h = lasso(&alpha, "", cycle);
            assert!(family.whole.accepts(&h));
            for x in &family.per_player {
                assert!(x.accepts(&h));
            }
        }
    }

    #[test]
    fn grim_profile_family_matches_the_expected_languages() {
        // Only player 1 faithful: the one-sided grim language. Only player 2
        // faithful: its mirror image.
        let game = presets::prisoners_dilemma();
        let alpha = game.alphabet().clone();
        let family = equilibrium_family(&presets::grim_trigger_both()).unwrap();

        let mut b = crate::automata::AutomatonBuilder::new(alpha.clone(), 2);
        b.add(0, letter(&alpha, "c,c"), 0).unwrap();
        b.add(0, letter(&alpha, "c,d"), 1).unwrap();
        b.add(1, letter(&alpha, "d,c"), 1).unwrap();
        b.add(1, letter(&alpha, "d,d"), 1).unwrap();
        let x1 = b.into_safety();
        assert!(equivalent(
            &family.per_player[0].to_buchi(),
            &x1.to_buchi()
        ));

        let mut b = crate::automata::AutomatonBuilder::new(alpha.clone(), 2);
        b.add(0, letter(&alpha, "c,c"), 0).unwrap();
        b.add(0, letter(&alpha, "d,c"), 1).unwrap();
        b.add(1, letter(&alpha, "c,d"), 1).unwrap();
        b.add(1, letter(&alpha, "d,d"), 1).unwrap();
        let x2 = b.into_safety();
        assert!(equivalent(
            &family.per_player[1].to_buchi(),
            &x2.to_buchi()
        ));

        // With two players the opponent languages swap.
        assert!(equivalent(
            &family.opponents[0].to_buchi(),
            &family.per_player[1].to_buchi()
        ));
        assert!(equivalent(
            &family.opponents[1].to_buchi(),
            &family.per_player[0].to_buchi()
        ));
        // The generated language is bare cooperation.
        assert!(contains(
            &family.whole.to_buchi(),
            &x1.intersect(&x2).to_buchi()
        )
        .holds());
    }
}
