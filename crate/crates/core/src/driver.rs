//! Batch orchestration: model, prime classification, the three forests,
//! per-prime extraction and lifting, and JSON-lines records.

use std::io::Write;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rug::Integer;
use serde::Serialize;

use crate::arith::{int_mod, primes_below};
use crate::finite_fields::Field;
use crate::hasse_witt::{assemble_w, compute_up};
use crate::jacobian::{fp_model_conic, fp_model_split, group_ops, reset_group_ops, twist_model, CurveFp};
use crate::lifting::{enumerate_inert, enumerate_split, lift_one, matches_split, naive_lift, LPoly, LiftStatus, ModP};
use crate::lpoly_modp::{b_relations, lpoly_inert, lpoly_split};
use crate::model_builder::{build_model, ConicQuartic, HyperModel};
use crate::quad_ring::{split_type, InertPrime, PrimeReduction, SplitPrime, SplitType};
use crate::recurrence::{init_vector, RecurrenceSource};
use crate::remainder_forest::{remainder_forest, LeafSource, TreeOutput};
use crate::{Error, Result};

pub const DEFAULT_KAPPA: u32 = 7;
pub const DEFAULT_NAIVE_THRESHOLD: u64 = 256;
/// Largest supported bound: primes must fit the single-word field code.
pub const MAX_BOUND: u64 = 1 << 32;
/// Random elements per Jacobian in verification checks.
pub const VERIFY_ELEMENTS: usize = 10;

/// Where the curve comes from. With both present, the explicit model
/// drives the forests and the conic supplies models over `F_p`.
#[derive(Clone, Debug)]
pub struct CurveSource {
    pub conic: Option<ConicQuartic>,
    pub model: Option<HyperModel>,
}

#[derive(Clone, Debug)]
pub struct JobConfig {
    pub source: CurveSource,
    pub bound: u64,
    /// `None` picks `min(7, log2 b)`.
    pub kappa: Option<u32>,
    pub naive_threshold: u64,
    pub seed: u64,
    pub threads: Option<usize>,
    pub verify: bool,
}

impl JobConfig {
    pub fn new(source: CurveSource, bound: u64) -> Self {
        JobConfig {
            source,
            bound,
            kappa: None,
            naive_threshold: DEFAULT_NAIVE_THRESHOLD,
            seed: 0,
            threads: None,
            verify: false,
        }
    }

    /// Checks the bound and returns the effective `kappa`.
    pub fn validate(&self) -> Result<u32> {
        if self.bound < 5 {
            return Err(Error::Config(format!("N = {} is below 5", self.bound)));
        }
        if self.bound > MAX_BOUND {
            return Err(Error::Config(format!("N = {} exceeds 2^32", self.bound)));
        }
        if self.source.conic.is_none() && self.source.model.is_none() {
            return Err(Error::Config("no curve given".into()));
        }
        let b = ((self.bound / 2) as usize).next_power_of_two();
        let ell = b.trailing_zeros();
        match self.kappa {
            None => Ok(DEFAULT_KAPPA.min(ell)),
            Some(k) if k <= ell => Ok(k),
            Some(k) => Err(Error::KappaRange { kappa: k, max: ell }),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Status {
    Ok,
    Exceptional(&'static str),
    Ambiguous,
    Bad,
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Status::Ok => write!(f, "ok"),
            Status::Exceptional(r) => write!(f, "exceptional:{r}"),
            Status::Ambiguous => write!(f, "ambiguous"),
            Status::Bad => write!(f, "bad"),
        }
    }
}

/// One output line. Timings are kept out of the serialized form so that
/// reruns are byte-identical.
#[derive(Clone, Debug, Serialize)]
pub struct PrimeRecord {
    pub p: u64,
    #[serde(serialize_with = "display")]
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub split: Option<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a1: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a2: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a3: Option<i64>,
    #[serde(skip)]
    pub timing: PrimeTiming,
}

fn display<S: serde::Serializer>(s: &Status, ser: S) -> std::result::Result<S::Ok, S::Error> {
    ser.collect_str(s)
}

#[derive(Clone, Copy, Debug, Default)]
pub struct PrimeTiming {
    /// `U_p` extraction, `W` assembly and the mod-`p` polynomial.
    pub extract_secs: f64,
    /// Model over `F_p`, twist and lifting.
    pub lift_secs: f64,
    pub lift_ops: u64,
    pub naive: bool,
}

impl PrimeRecord {
    fn new(p: u64, status: Status, split: Option<&'static str>) -> Self {
        PrimeRecord { p, status, split, a1: None, a2: None, a3: None, timing: PrimeTiming::default() }
    }

    pub fn coeffs(&self) -> Option<[i64; 3]> {
        Some([self.a1?, self.a2?, self.a3?])
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("records serialize")
    }
}

#[derive(Clone, Debug, Default)]
pub struct RunStats {
    pub kappa: u32,
    pub model_secs: f64,
    pub tree_secs: f64,
    pub prime_secs: f64,
    pub primes: usize,
    pub ok: usize,
    pub exceptional: usize,
    pub ambiguous: usize,
    pub bad: usize,
}

#[derive(Clone, Debug)]
pub struct RunOutput {
    pub model: HyperModel,
    pub records: Vec<PrimeRecord>,
    pub stats: RunStats,
}

impl RunOutput {
    pub fn write_jsonl<W: Write>(&self, mut w: W) -> Result<()> {
        for r in &self.records {
            writeln!(w, "{}", r.to_json())?;
        }
        Ok(())
    }

    pub fn exceptional_primes(&self) -> Vec<u64> {
        self.records.iter().filter(|r| matches!(r.status, Status::Exceptional(_))).map(|r| r.p).collect()
    }
}

/// Norms and differences tested against each prime.
pub struct Classifier {
    d: i64,
    translates: [i64; 3],
    disc_norm: Integer,
    value_norms: [Integer; 3],
}

impl Classifier {
    pub fn new(model: &HyperModel) -> Self {
        let disc_norm = model.discriminant().norm(model.disc);
        let value_norms = model.translates.map(|b| model.h.eval_int(b).norm(model.disc));
        Classifier { d: model.disc.d(), translates: model.translates, disc_norm, value_norms }
    }

    /// Reason an odd prime is skipped, if any. Divisibility by an element
    /// of `O_K` is read through its norm.
    pub fn classify(&self, p: u64) -> Option<&'static str> {
        let [b0, b1, b2] = self.translates;
        let divides = |x: &Integer| int_mod(x, p) == 0;
        if p <= 7 {
            Some("small")
        } else if self.d.rem_euclid(p as i64) == 0 {
            Some("ramified")
        } else if [b0 - b1, b0 - b2, b1 - b2].iter().any(|x| x.rem_euclid(p as i64) == 0) {
            Some("translates")
        } else if divides(&self.disc_norm) {
            Some("disc")
        } else if self.value_norms.iter().any(divides) {
            Some("h-beta")
        } else {
            None
        }
    }
}

/// Runs the forest for every translate, concurrently.
pub fn run_forests(model: &HyperModel, bound: u64, kappa: u32) -> Result<Vec<TreeOutput>> {
    model
        .translates
        .par_iter()
        .map(|&b| {
            let src = RecurrenceSource::new(&model.h.shift(b), model.disc, bound);
            log::debug!("forest for beta = {b}: {} leaves", src.len());
            remainder_forest(&src, &init_vector(), kappa)
        })
        .collect()
}

/// Per-prime RNG stream, independent of scheduling.
pub fn prime_rng(seed: u64, p: u64) -> ChaCha8Rng {
    let mut s = [0u8; 32];
    s[..8].copy_from_slice(&seed.to_le_bytes());
    s[8..16].copy_from_slice(&p.to_le_bytes());
    ChaCha8Rng::from_seed(s)
}

fn ups_for<R: PrimeReduction>(
    model: &HyperModel,
    trees: &[TreeOutput],
    p: u64,
    red: &R,
) -> Result<[[<R::F as Field>::Elem; 3]; 3]> {
    let n = ((p - 1) / 2) as usize;
    let mut out = [[red.field().zero(); 3]; 3];
    for (i, &b) in model.translates.iter().enumerate() {
        out[i] = compute_up(&trees[i].get(n), &model.h.eval_int(b), model.disc, red)?;
    }
    Ok(out)
}

/// `L_p mod p` from the tree outputs.
pub fn mod_p_data(model: &HyperModel, trees: &[TreeOutput], p: u64) -> Result<ModP> {
    match split_type(model.disc, p) {
        SplitType::Split => {
            let red = SplitPrime::new(model.disc, p).expect("split");
            let w = assemble_w(red.field(), &ups_for(model, trees, p, &red)?, model.translates)?;
            Ok(ModP::Split(lpoly_split(red.field(), &w)))
        }
        SplitType::Inert => {
            let red = InertPrime::new(model.disc, p).expect("inert");
            let w = assemble_w(red.field(), &ups_for(model, trees, p, &red)?, model.translates)?;
            Ok(ModP::Inert(lpoly_inert(red.field(), &w)?))
        }
        SplitType::Ramified => Err(Error::BadReduction(p)),
    }
}

/// Whether `a` reduces to the mod-`p` data.
pub fn consistent(a: [i64; 3], md: ModP, p: u64) -> bool {
    match md {
        ModP::Split(r) => matches_split(a, r, p),
        ModP::Inert(b) => b_relations(a, p) == b,
    }
}

/// A model of the reduction over `F_p`, when the input provides one.
pub fn fp_model(source: &CurveSource, model: &HyperModel, p: u64) -> Option<Result<CurveFp>> {
    if let Some(cq) = &source.conic {
        return Some(fp_model_conic(cq, p));
    }
    let red = SplitPrime::new(model.disc, p)?;
    Some(fp_model_split(&model.h, &red))
}

/// `L(1) a = 0` on the curve and `L(-1) a = 0` on the twist for fresh
/// random elements.
pub fn annihilation_check(curve: &CurveFp, twist: &CurveFp, a: [i64; 3], rng: &mut ChaCha8Rng, count: usize) -> bool {
    let (lp, lm) = crate::lifting::l_at_pm1(curve.p(), a);
    if lp <= 0 || lm <= 0 {
        return false;
    }
    (0..count).all(|_| {
        let x = curve.random_element(rng);
        let y = twist.random_element(rng);
        curve.mul(lp as u128, &x) == curve.identity() && twist.mul(lm as u128, &y) == twist.identity()
    })
}

struct Context<'a> {
    cfg: &'a JobConfig,
    model: &'a HyperModel,
    trees: &'a [TreeOutput],
    classifier: Classifier,
}

impl Context<'_> {
    fn process(&self, p: u64) -> PrimeRecord {
        let split = match split_type(self.model.disc, p) {
            SplitType::Split => Some("s"),
            SplitType::Inert => Some("i"),
            SplitType::Ramified => None,
        };
        if let Some(reason) = self.classifier.classify(p) {
            return PrimeRecord::new(p, Status::Exceptional(reason), split);
        }
        let t0 = Instant::now();
        let md = match mod_p_data(self.model, self.trees, p) {
            Ok(md) => md,
            Err(e) => {
                log::warn!("p = {p}: {e}");
                return PrimeRecord::new(p, Status::Bad, split);
            }
        };
        let extract_secs = t0.elapsed().as_secs_f64();

        let t1 = Instant::now();
        reset_group_ops();
        let mut rng = prime_rng(self.cfg.seed, p);
        let naive = p < self.cfg.naive_threshold;
        let (status, a) = self.lift(p, md, naive, &mut rng);
        let mut rec = PrimeRecord::new(p, status, split);
        if rec.status == Status::Ok {
            [rec.a1, rec.a2, rec.a3] = a.map(Some);
        }
        rec.timing = PrimeTiming { extract_secs, lift_secs: t1.elapsed().as_secs_f64(), lift_ops: group_ops(), naive };
        rec
    }

    fn lift(&self, p: u64, md: ModP, naive: bool, rng: &mut ChaCha8Rng) -> (Status, [i64; 3]) {
        let curve = match fp_model(&self.cfg.source, self.model, p) {
            None => return (Status::Exceptional("no-fp-model"), [0; 3]),
            Some(Ok(c)) => c,
            Some(Err(e)) => {
                log::warn!("p = {p}: {e}");
                return (Status::Bad, [0; 3]);
            }
        };
        let lp: Result<LPoly> = if naive {
            naive_lift(curve.h(), p)
        } else {
            let cands = match md {
                ModP::Split(a) => Ok(enumerate_split(a, p)),
                ModP::Inert(b) => enumerate_inert(b, p),
            };
            cands.and_then(|c| Ok(lift_one(&c, &curve, &twist_model(&curve)?, rng)))
        };
        let lp = match lp {
            Ok(l) => l,
            Err(e) => {
                log::warn!("p = {p}: {e}");
                return (Status::Bad, [0; 3]);
            }
        };
        match lp.status {
            LiftStatus::Ok => {}
            LiftStatus::Ambiguous => return (Status::Ambiguous, [0; 3]),
            LiftStatus::Inconsistent => {
                log::warn!("p = {p}: no lift consistent with the group data");
                return (Status::Bad, [0; 3]);
            }
        }
        if !consistent(lp.a, md, p) {
            log::warn!("p = {p}: {:?} does not reduce to the Hasse-Witt data", lp.a);
            return (Status::Bad, [0; 3]);
        }
        if self.cfg.verify && !self.verify(p, &curve, lp.a, naive, rng) {
            return (Status::Bad, [0; 3]);
        }
        (Status::Ok, lp.a)
    }

    fn verify(&self, p: u64, curve: &CurveFp, a: [i64; 3], naive: bool, rng: &mut ChaCha8Rng) -> bool {
        // counting below the threshold already produced `a`; recheck it
        // against an independent count on the conic where possible
        if naive {
            if let Some(cq) = &self.cfg.source.conic {
                let n1 = crate::oracle::conic_count(&crate::finite_fields::Fp::new(p), cq);
                let want = (p as i64 + 1 + a[0]) as u64;
                if n1.map(|n| n != want).unwrap_or(false) {
                    log::warn!("p = {p}: conic count disagrees");
                    return false;
                }
            }
            return true;
        }
        let ok = twist_model(curve).map(|t| annihilation_check(curve, &t, a, rng, VERIFY_ELEMENTS)).unwrap_or(false);
        if !ok {
            log::warn!("p = {p}: annihilation check failed");
        }
        ok
    }
}

/// Resolves the hyperelliptic model for a source.
pub fn resolve_model(source: &CurveSource) -> Result<HyperModel> {
    match (&source.model, &source.conic) {
        (Some(m), _) => Ok(m.clone()),
        (None, Some(cq)) => build_model(cq),
        (None, None) => Err(Error::Config("no curve given".into())),
    }
}

/// Every odd prime below the bound, in ascending order, with its record.
pub fn run_pipeline(cfg: &JobConfig) -> Result<RunOutput> {
    let kappa = cfg.validate()?;
    match cfg.threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| Error::Config(e.to_string()))?
            .install(|| run_inner(cfg, kappa)),
        None => run_inner(cfg, kappa),
    }
}

fn run_inner(cfg: &JobConfig, kappa: u32) -> Result<RunOutput> {
    let mut stats = RunStats { kappa, ..Default::default() };
    let t = Instant::now();
    let model = resolve_model(&cfg.source)?;
    stats.model_secs = t.elapsed().as_secs_f64();
    log::info!("model over Q(sqrt {}), translates {:?}", model.disc.d(), model.translates);

    let t = Instant::now();
    let trees = run_forests(&model, cfg.bound, kappa)?;
    stats.tree_secs = t.elapsed().as_secs_f64();
    log::info!("forests done in {:.2}s (kappa = {kappa})", stats.tree_secs);

    let t = Instant::now();
    let ctx = Context { cfg, model: &model, trees: &trees, classifier: Classifier::new(&model) };
    let primes: Vec<u64> = primes_below(cfg.bound).into_iter().filter(|&p| p > 2).collect();
    let records: Vec<PrimeRecord> = primes.par_iter().map(|&p| ctx.process(p)).collect();
    stats.prime_secs = t.elapsed().as_secs_f64();

    stats.primes = records.len();
    for r in &records {
        match r.status {
            Status::Ok => stats.ok += 1,
            Status::Exceptional(_) => stats.exceptional += 1,
            Status::Ambiguous => stats.ambiguous += 1,
            Status::Bad => stats.bad += 1,
        }
    }
    log::info!(
        "{} primes: {} ok, {} exceptional, {} ambiguous, {} bad",
        stats.primes,
        stats.ok,
        stats.exceptional,
        stats.ambiguous,
        stats.bad
    );
    Ok(RunOutput { model, records, stats })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad_ring::{QuadDisc, QuadInt, QuadIntPoly};

    pub(crate) fn c2_model() -> HyperModel {
        let h = [(3, 2), (-2, -4), (-4, 4), (-2, -4), (2, 0), (2, -4), (-4, -4), (2, -4), (3, -2)];
        let h = QuadIntPoly::new(h.iter().map(|&(a, b)| QuadInt::new(a, b)).collect());
        HyperModel::new(QuadDisc::new(-1).unwrap(), h, [0, 1, 2]).unwrap()
    }

    fn c2_conic() -> ConicQuartic {
        ConicQuartic::new([1, 0, 0, 1, 0, 1], [1, 0, -1, -2, -2, -1, 0, -1, -1, 1, -2, -1, -1, 0, 1])
    }

    #[test]
    fn status_strings() {
        assert_eq!(Status::Ok.to_string(), "ok");
        assert_eq!(Status::Exceptional("disc").to_string(), "exceptional:disc");
        let mut r = PrimeRecord::new(11, Status::Ok, Some("s"));
        [r.a1, r.a2, r.a3] = [Some(1), Some(-2), Some(3)];
        assert_eq!(r.to_json(), r#"{"p":11,"status":"ok","split":"s","a1":1,"a2":-2,"a3":3}"#);
        let r = PrimeRecord::new(3, Status::Exceptional("small"), None);
        assert_eq!(r.to_json(), r#"{"p":3,"status":"exceptional:small"}"#);
    }

    #[test]
    fn classify_examples() {
        let c = Classifier::new(&c2_model());
        let bad: Vec<u64> = primes_below(400).into_iter().skip(1).filter(|&p| c.classify(p).is_some()).collect();
        assert_eq!(bad, vec![3, 5, 7, 13, 31, 269]);
        // p | D
        let m = HyperModel { disc: QuadDisc::new(-3).unwrap(), ..c2_model() };
        assert_eq!(Classifier::new(&m).classify(3), Some("small"));
        let m = HyperModel { disc: QuadDisc::new(-11).unwrap(), ..c2_model() };
        assert_eq!(Classifier::new(&m).classify(11), Some("ramified"));
    }

    #[test]
    fn config_validation() {
        let src = CurveSource { conic: None, model: Some(c2_model()) };
        assert!(JobConfig::new(src.clone(), 4).validate().is_err());
        assert_eq!(JobConfig::new(src.clone(), 64).validate().unwrap(), 5);
        assert_eq!(JobConfig::new(src.clone(), 1 << 12).validate().unwrap(), 7);
        let mut cfg = JobConfig::new(src, 64);
        cfg.kappa = Some(6);
        assert!(matches!(cfg.validate(), Err(Error::KappaRange { kappa: 6, max: 5 })));
    }

    #[test]
    fn tiny_bound_records() {
        let src = CurveSource { conic: None, model: Some(c2_model()) };
        let out = run_pipeline(&JobConfig::new(src, 6)).unwrap();
        let ps: Vec<u64> = out.records.iter().map(|r| r.p).collect();
        assert_eq!(ps, vec![3, 5]);
    }

    #[test]
    fn small_run_matches_oracle() {
        let src = CurveSource { conic: Some(c2_conic()), model: Some(c2_model()) };
        let mut cfg = JobConfig::new(src, 200);
        cfg.naive_threshold = 60;
        cfg.verify = true;
        let out = run_pipeline(&cfg).unwrap();
        assert_eq!(out.stats.bad + out.stats.ambiguous, 0, "{:?}", out.stats);
        for r in out.records.iter().filter(|r| r.status == Status::Ok) {
            let c = fp_model_conic(&c2_conic(), r.p).unwrap();
            assert_eq!(r.coeffs().unwrap(), crate::oracle::naive_lpoly(c.h(), r.p).unwrap(), "p={}", r.p);
        }
        assert!(out.stats.ok > 30);
    }

    #[test]
    fn model_only_inert_primes() {
        let src = CurveSource { conic: None, model: Some(c2_model()) };
        let out = run_pipeline(&JobConfig::new(src, 60)).unwrap();
        for r in &out.records {
            if r.split == Some("i") && r.p > 7 && r.p != 13 && r.p != 31 {
                assert_eq!(r.status, Status::Exceptional("no-fp-model"));
            }
            if r.split == Some("s") && r.status != Status::Ok {
                assert!(matches!(r.status, Status::Exceptional(_)));
            }
        }
    }
}
