use xxz_pin::solver::{lowest_eigenvalues, SolverConfig};
use xxz_pin::spin::params_from_delta;
use xxz_pin::BoundaryCondition;
use xxz_pin_cli::presets::{preset, render, FigureId, FigureJob, FIG3_SITE};
use xxz_pin_cli::sweep::{PointJob, SweepParam};

fn a() -> f64 {
    params_from_delta(2.25).unwrap().a
}

#[test]
fn preset_parameters() {
    for id in FigureId::ALL {
        let p = preset(id);
        assert_eq!(FigureId::parse(id.name()).unwrap(), id);
        match (id, &p.job) {
            (FigureId::Fig1, FigureJob::ClosedForm { delta, b_max, .. }) => {
                assert_eq!(*delta, 2.25);
                assert!(*b_max > a());
            }
            (FigureId::Fig2 | FigureId::Fig2_5 | FigureId::Fig3, FigureJob::Sweep(s)) => {
                let t = s.template;
                assert_eq!((t.sites, t.bc, t.j()), (13, BoundaryCondition::PlusMinus, 0.5));
                assert_eq!(t.params.delta, 2.25);
                assert_eq!(s.param, SweepParam::B1);
                assert_eq!((s.start, s.stop, s.steps), (-1.2, 1.2, 49));
                let (b3, k, y) = match id {
                    FigureId::Fig2 => (0.0, 16, 7),
                    FigureId::Fig2_5 => (a() / 6.0, 16, 7),
                    _ => (3.0, 20, FIG3_SITE),
                };
                assert_eq!(t.b()[2], b3);
                assert_eq!(t.y(), y);
                assert_eq!(s.job, PointJob::Lowest(k));
            }
            (FigureId::Fig4, FigureJob::Sectors { spec, .. }) => {
                assert_eq!((spec.sites, spec.bc), (11, BoundaryCondition::PlusMinus));
                assert_eq!(spec.b(), [0.0, 0.0, 1.5]);
                assert_eq!(spec.params.delta, 2.25);
            }
            (FigureId::Fig5, FigureJob::Sweep(s)) => {
                assert_eq!((s.template.sites, s.template.bc), (13, BoundaryCondition::PlusPlus));
                assert_eq!(s.param, SweepParam::B3);
                assert_eq!(s.job, PointJob::LowestLabeled(5));
            }
            (FigureId::Fig6 | FigureId::Fig7, FigureJob::Sectors { spec, per_sector, .. }) => {
                assert_eq!((spec.sites, spec.bc), (13, BoundaryCondition::PlusPlus));
                assert!((spec.b()[2] - 1.5 * a()).abs() < 1e-15);
                assert_eq!(per_sector.is_none(), id == FigureId::Fig6);
            }
            _ => panic!("{} has the wrong job kind", id.name()),
        }
    }
}

#[test]
fn fig1_lines_cross_at_critical_field() {
    let out = render(&preset(FigureId::Fig1), &SolverConfig::default()).unwrap();
    let rows: Vec<Vec<f64>> = out
        .table
        .to_csv()
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    // Closest grid point to the crossing of B/2 and A - B/2.
    let r = rows.iter().min_by(|x, y| (x[1] - x[2]).abs().total_cmp(&(y[1] - y[2]).abs())).unwrap();
    assert!((r[0] - 0.895806).abs() < 1e-6);
    assert!((r[1] - a() / 2.0).abs() < 1e-9 && (r[2] - a() / 2.0).abs() < 1e-9);
}

#[test]
fn fig3_descending_levels() {
    let p = preset(FigureId::Fig3);
    let FigureJob::Sweep(s) = &p.job else { panic!() };
    let cfg = SolverConfig::default();
    let at = |b1: f64| lowest_eigenvalues(&s.spec_at(b1).unwrap(), 12, &cfg).unwrap().eigenvalues;
    let e0 = at(0.0);
    let near: Vec<f64> = e0.iter().copied().filter(|e| (e + 1.5).abs() < 0.1).collect();
    assert_eq!(near.len(), 6);
    let e1 = at(0.3);
    for i in 0..6 {
        assert!(e1[i] < e0[i]);
    }
}

#[test]
fn fig6_and_fig7() {
    let cfg = SolverConfig::default();
    let full = render(&preset(FigureId::Fig6), &cfg).unwrap();
    assert_eq!(full.table.rows.len(), 1 << 13);
    let low = render(&preset(FigureId::Fig7), &cfg).unwrap();
    let csv = low.table.to_csv();
    let first = csv.lines().nth(1).unwrap();
    // Sorted by energy: the lowest row belongs to the all-down sector.
    assert!(first.ends_with(",13"), "{first}");
}
