//! Library results checked against independent reference computations:
//! double-double arithmetic for the cube-root example, closed forms for
//! linear maps and a brute-force recursion for the error bounds.

use fixpoint_core::bounds::{bound_ratio, new_scheme_bound, picard_mann_bound, BoundInputs};
use fixpoint_core::delay::{method_of_steps_oracle, solve_dde};
use fixpoint_core::harness::{compare_schemes, rate_ratio_empirical};
use fixpoint_core::problems::{cuberoot, delay_problem, linear};
use fixpoint_core::{iterate, step, Point, Schedule, SchemeKind, Sequence, StepParams};

/// Unevaluated sum `hi + lo` with |lo| ≤ ulp(hi)/2.
#[derive(Clone, Copy, Debug)]
struct Dd {
    hi: f64,
    lo: f64,
}

impl Dd {
    fn new(v: f64) -> Self {
        Dd { hi: v, lo: 0.0 }
    }

    fn two_sum(a: f64, b: f64) -> Dd {
        let s = a + b;
        let bb = s - a;
        let err = (a - (s - bb)) + (b - bb);
        Dd { hi: s, lo: err }
    }

    fn norm(self) -> Dd {
        Dd::two_sum(self.hi, self.lo)
    }

    fn add(self, o: Dd) -> Dd {
        let s = Dd::two_sum(self.hi, o.hi);
        Dd {
            hi: s.hi,
            lo: s.lo + self.lo + o.lo,
        }
        .norm()
    }

    fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }

    fn sub(self, o: Dd) -> Dd {
        self.add(o.neg())
    }

    fn mul(self, o: Dd) -> Dd {
        let p = self.hi * o.hi;
        let err = self.hi.mul_add(o.hi, -p);
        Dd {
            hi: p,
            lo: err + self.hi * o.lo + self.lo * o.hi,
        }
        .norm()
    }

    fn div(self, o: Dd) -> Dd {
        let q1 = self.hi / o.hi;
        let r = self.sub(o.mul(Dd::new(q1)));
        let q2 = r.hi / o.hi;
        Dd::two_sum(q1, q2)
    }

    fn cbrt(self) -> Dd {
        let mut y = Dd::new(self.hi.cbrt());
        for _ in 0..3 {
            let y2 = y.mul(y);
            let f = y2.mul(y).sub(self);
            y = y.sub(f.div(Dd::new(3.0).mul(y2)));
        }
        y
    }

    fn f64(self) -> f64 {
        self.hi + self.lo
    }
}

fn t_dd(x: Dd) -> Dd {
    x.add(Dd::new(2.0)).cbrt()
}

fn mix_dd(x: Dd, y: Dd, a: f64) -> Dd {
    Dd::new(1.0 - a).mul(x).add(Dd::new(a).mul(y))
}

#[test]
fn dd_oracle_sanity() {
    let c = Dd::new(3.375).cbrt();
    assert_eq!(c.hi, 1.5);
    assert!(c.lo.abs() < 1e-30);
}

#[test]
fn new_two_step_first_step_against_double_double() {
    let x = Dd::new(1.99);
    let y = t_dd(mix_dd(x, t_dd(x), 0.25));
    let want = t_dd(mix_dd(y, t_dd(y), 0.25)).f64();
    assert!((want - 1.5272).abs() < 5e-5);
    let p = cuberoot();
    let got = step(SchemeKind::NewTwoStep, &1.99, &p.map, StepParams::new(0, 0.25, 0.25, 0.25)).unwrap();
    assert!((got - want).abs() < 1e-14, "{got} vs {want}");
}

#[test]
fn picard_mann_first_step_against_double_double() {
    let x = Dd::new(1.99);
    let want = t_dd(mix_dd(x, t_dd(x), 0.25)).f64();
    assert!((want - 1.5726).abs() < 5e-5);
    let p = cuberoot();
    let got = step(SchemeKind::PicardMann, &1.99, &p.map, StepParams::new(0, 0.25, 0.25, 0.25)).unwrap();
    assert!((got - want).abs() < 1e-14, "{got} vs {want}");
}

fn bisection_root() -> f64 {
    let g = |x: f64| x * x * x - x - 2.0;
    let (mut lo, mut hi) = (1.0f64, 2.0f64);
    while hi - lo > 1e-15 {
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn new_two_step_converges_to_bisection_root() {
    let p = cuberoot();
    let sched = Schedule::uniform(0.25).unwrap();
    let trace = iterate(SchemeKind::NewTwoStep, &p.map, &p.x0, &sched, 1e-12, 100).unwrap();
    assert!(trace.converged());
    let root = bisection_root();
    assert!((root - 1.5213797068).abs() < 1e-10);
    assert!((trace.last().x - root).abs() < 1e-12);
}

#[test]
fn linear_errors_equal_bounds() {
    let sched = Schedule::uniform(0.25).unwrap();
    for delta in [0.3, 0.5, 0.9] {
        let prob = linear(delta).unwrap();
        let new = iterate(SchemeKind::NewTwoStep, &prob.map, &1.0, &sched, 1e-300, 51).unwrap();
        let pm = iterate(SchemeKind::PicardMann, &prob.map, &1.0, &sched, 1e-300, 51).unwrap();
        let inp = BoundInputs::new(delta, Sequence::Constant(0.25), Sequence::Constant(0.25), 1.0, 0).unwrap();
        // Brute-force products, independent of the fold in `bounds`.
        let (mut e_new, mut e_pm) = (1.0f64, 1.0f64);
        let f = 1.0 - 0.25 * (1.0 - delta);
        for n in 0..=50 {
            e_new *= delta * delta * f * f;
            e_pm *= delta * f;
            let b_new = new_scheme_bound(&inp.with_n(n));
            let b_pm = picard_mann_bound(&inp.with_n(n));
            assert!((b_new - e_new).abs() <= 1e-12 * e_new);
            assert!((b_pm - e_pm).abs() <= 1e-12 * e_pm);
            let got_new = new.records[n + 1].err.unwrap();
            let got_pm = pm.records[n + 1].err.unwrap();
            assert!((got_new - b_new).abs() <= 1e-12 * b_new, "delta {delta} n {n}");
            assert!((got_pm - b_pm).abs() <= 1e-12 * b_pm, "delta {delta} n {n}");
            assert!(got_new <= b_new * (1.0 + 1e-12));
        }
    }
}

#[test]
fn empirical_ratio_tracks_bound_ratio() {
    let sched = Schedule::uniform(0.25).unwrap();
    for delta in [0.3, 0.5, 0.9] {
        let prob = linear(delta).unwrap();
        let kinds = [SchemeKind::NewTwoStep, SchemeKind::PicardMann];
        let report = compare_schemes(&kinds, &prob.map, &1.0, &sched, 1e-300, 30).unwrap();
        let a = &report.run(SchemeKind::NewTwoStep).unwrap().trace;
        let b = &report.run(SchemeKind::PicardMann).unwrap().trace;
        let ratios: Vec<f64> = rate_ratio_empirical(a, b, &0.0).unwrap().into_iter().map(|(_, r)| r.unwrap()).collect();
        for w in ratios.windows(2) {
            assert!(w[1] <= w[0]);
        }
        let inp = BoundInputs::new(delta, Sequence::Constant(0.25), Sequence::Constant(0.25), 1.0, 0).unwrap();
        let last = ratios.len() - 1;
        let envelope = ratios[0] * bound_ratio(&inp.with_n(last - 1)) / bound_ratio(&inp.with_n(0)) * 10.0;
        assert!(ratios[last] <= envelope);
    }
}

#[test]
fn dde_second_order_on_exponential_decay() {
    let prob = delay_problem("decay", 0.0, 0.45).unwrap();
    let sched = Schedule::uniform(0.25).unwrap();
    let mut errs = Vec::new();
    for h in [0.01, 0.005, 0.0025] {
        let sol = solve_dde(&prob, h, &sched, 1e-13, 200).unwrap();
        assert!(sol.converged);
        let oracle = method_of_steps_oracle(&prob, h).unwrap();
        // The oracle itself agrees with e^{-t} far below the trapezoid error.
        for (t, v) in oracle.iter().filter(|(t, _)| *t >= 0.0) {
            assert!((v - (-t).exp()).abs() < 1e-9);
        }
        errs.push(sol.solution.distance(&oracle));
    }
    for w in errs.windows(2) {
        let ratio = w[0] / w[1];
        assert!((3.5..=4.5).contains(&ratio), "{errs:?}");
    }
}
