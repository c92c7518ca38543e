//! One line per acceptance criterion, with its pinned tolerances.

use radial_kahler::reproduce::{run_item, ReproItem, ReproOptions, Status};

struct Criterion {
    number: u32,
    summary: &'static str,
    items: &'static [&'static str],
    /// Wall-clock bound per item, in milliseconds.
    max_ms: Option<u64>,
}

const CRITERIA: &[Criterion] = &[
    Criterion {
        number: 1,
        summary: "g_7(3/4), n=2 equals -12294367331/2373046875, exact, zero tolerance, < 1 s",
        items: &["table-n2-h7"],
        max_ms: Some(1_000),
    },
    Criterion {
        number: 2,
        summary: "g_5(3/4) n=3 within 0.01 of -2.81, n=4 within 0.05 of -10.3, g_4(6/5) n=5 within 0.005 of -0.14, each < 1 s",
        items: &["table-n3-h5", "table-n4-h5", "table-n5-h4"],
        max_ms: Some(1_000),
    },
    Criterion {
        number: 3,
        summary: "g_4(1) > 0 for n=2..5, < 0 for n=6..20, closed form to relative 1e-30, < 5 s",
        items: &["g4-at-1-sign-pattern"],
        max_ms: Some(5_000),
    },
    Criterion {
        number: 4,
        summary: "g_3(1+10^-k) < 0, k=1..5, growth >= 5x; closed form to relative 1e-30 at 10 points",
        items: &["g3-eps-minus1-divergence"],
        max_ms: None,
    },
    Criterion {
        number: 5,
        summary: "g_(floor(lambda)+2)(10^-k) < 0, k=2..5, growth >= 10x, lambda in {1/2,3/2,5/2}, n in {2,3}",
        items: &["small-x-blowup"],
        max_ms: None,
    },
    Criterion {
        number: 6,
        summary: "exact zero Ricci-flat residual; Ric entries below 1e-40 at 256 bits",
        items: &["ricci-flat-eps"],
        max_ms: None,
    },
    Criterion {
        number: 7,
        summary: "|R|^2 matches the closed form to relative 1e-25, n=2..5, 10 points each",
        items: &["curvature-norm-closed-form"],
        max_ms: None,
    },
    Criterion {
        number: 8,
        summary: "a3 changes sign once on (0,3], bracket of (2/5)^(1/2) within 1e-10, ratio spread < 1e-20",
        items: &["a3-vanishing-locus"],
        max_ms: None,
    },
    Criterion {
        number: 9,
        summary: "Simanca rho = a2 = a3 = 0, |R|^2 = 4|Ric|^2, six components, within 1e-30",
        items: &["simanca-suite"],
        max_ms: None,
    },
    Criterion {
        number: 10,
        summary: "(a+b)e^(a+b) coefficients equal (j+k)/(j!k!) exactly for j+k <= 10",
        items: &["simanca-embedding"],
        max_ms: None,
    },
    Criterion {
        number: 11,
        summary: "flat all-positive to (3,5); M(0,h) = g_h exactly; eps=-1 obstructed at (0,3) for s^2 = 1.01",
        items: &["resolvability-sanity"],
        max_ms: None,
    },
    Criterion {
        number: 12,
        summary: "property suites (1000 jet cases, routes to h=10, additive constant, symmetries, +/- s), zero failures",
        items: &["property-suites"],
        max_ms: None,
    },
];

fn judge(c: &Criterion, items: &[ReproItem]) -> Status {
    items.iter().fold(Status::Pass, |acc, item| {
        let slow = match (c.max_ms, item.runtime_ms) {
            (Some(bound), Some(ms)) => ms > bound,
            _ => false,
        };
        acc.and(if slow { Status::Fail } else { item.status })
    })
}

#[test]
fn acceptance_criteria() {
    let opts = ReproOptions::default();
    let mut failed = Vec::new();
    for c in CRITERIA {
        let items: Vec<ReproItem> = c
            .items
            .iter()
            .map(|id| run_item(id, &opts).expect("known item"))
            .collect();
        let status = judge(c, &items);
        let word = match status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Inconclusive => "INCONCLUSIVE",
        };
        let ms: u64 = items.iter().filter_map(|i| i.runtime_ms).sum();
        println!("criterion {:>2} {word}: {} [{ms} ms]", c.number, c.summary);
        for item in &items {
            println!("    {}: {}", item.id, item.computed);
        }
        if status != Status::Pass {
            failed.push(c.number);
        }
    }
    assert!(failed.is_empty(), "criteria not passed: {failed:?}");
}
