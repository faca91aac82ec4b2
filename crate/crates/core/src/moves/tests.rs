use super::*;
use crate::exactalg::abelian_iso;
use crate::homology::h1;
use crate::notation::{parse_expr, print_expr};

fn e(s: &str) -> Manifold {
    parse_expr(s).unwrap_or_else(|err| panic!("{s}: {err}"))
}

fn n(s: &str) -> String {
    print_expr(&normalize(&e(s)))
}

fn same_h1(a: &Manifold, b: &Manifold) -> bool {
    abelian_iso(&h1(a).unwrap(), &h1(b).unwrap())
}

#[test]
fn disk_with_opposite_halves() {
    assert_eq!(n("SFS(D;(2,1),(2,-1))"), "SFS(D;(2,1),(2,1))");
}

#[test]
fn longitudinal_filling_splits() {
    assert_eq!(n("SFS(S2;(2,1),(3,1),(0,1))"), "L(2,1) # L(3,1)");
    let split = apply_move(&e("SFS(S2;(2,1),(3,1),(0,1))"), Move::SplitClosed { fiber: 2 }).unwrap();
    assert_eq!(print_expr(&normalize(&split)), "L(2,1) # L(3,1)");
}

#[test]
fn lens_spaces() {
    assert_eq!(n("L(5,3)"), "L(5,2)");
    assert_eq!(n("SFS(S2;(2,1),(3,1))"), n("L(5,1)"));
    assert_eq!(n("SFS(S2;(1,0))"), "S2xS1");
    assert_eq!(equivalent(&e("L(5,2)"), &e("L(5,3)")), Verdict::Yes);
    assert!(matches!(equivalent(&e("L(7,1)"), &e("L(7,2)")), Verdict::No { .. }));
    assert!(matches!(equivalent(&e("L(7,1)"), &e("L(8,1)")), Verdict::No { ref invariant } if invariant == "H1"));
}

#[test]
fn disk_22_is_the_mobius_bundle() {
    let d22 = e("SFS(D;(2,1),(2,1))");
    let mb = e("SFS(Mb;)");
    assert_eq!(equivalent(&d22, &mb), Verdict::Yes);
    let glued = e("SFS(D;(2,1),(2,1)) =[0,1;1,0]= SFS(D;(2,1),(3,1))");
    let toggled = apply_move(&glued, Move::RefiberFrom { gluing: 0 }).unwrap();
    assert!(print_expr(&toggled).starts_with("SFS(Mb;)"));
    assert_eq!(equivalent(&glued, &toggled), Verdict::Yes);
    let back = apply_move(&toggled, Move::RefiberFrom { gluing: 0 }).unwrap();
    assert_eq!(back, glued);
}

#[test]
fn refiber_formulas_invert() {
    let m = Mat2::new(2, 3, 1, 1);
    for from_side in [true, false] {
        assert_eq!(refibered(refibered(m, from_side, true), from_side, false), m);
        assert_eq!(refibered(m, from_side, true).det(), m.det());
    }
    assert_eq!(refibered(m, true, true), Mat2::new(3, 1, 1, 0));
    assert_eq!(refibered(m, false, true), Mat2::new(3, 4, -2, -3));
}

#[test]
fn sporadic_intersection() {
    let k = 3;
    assert_eq!(fiber_intersection(&Mat2::new(1 + k, 2 + k, -k, -1 - k)), 5);
    assert_eq!(fiber_intersection(&Mat2::new(0, 1, 1, 0)), 1);
}

#[test]
fn move_errors() {
    let self_glued = e("SFS(A;(2,1)) /[0,1;1,0]");
    assert_eq!(apply_move(&self_glued, Move::Negate { gluing: 0 }), Err(MoveError::SelfGluing(0)));
    let glued = e("SFS(D;(2,1),(3,1)) =[0,1;1,0]= SFS(D;(2,1),(3,1))");
    assert!(matches!(apply_move(&glued, Move::RefiberFrom { gluing: 0 }), Err(MoveError::NotRefiberable { .. })));
    assert!(matches!(
        apply_move(&glued, Move::Shift { block: 0, fiber: 9, k: 1 }),
        Err(MoveError::NoSite { what: "fiber", .. })
    ));
    assert_eq!(apply_move(&e("SFS(S2;(2,1))"), Move::Shift { block: 0, fiber: 0, k: 1 }), Err(MoveError::ClosedBlock(0)));
}

#[test]
fn transfer_with_zero_is_identity() {
    let x = e("SFS(S2;(2,1),(3,1),(5,2))");
    assert_eq!(apply_move(&x, Move::Transfer { block: 0, first: 0, second: 2, k: 0 }).unwrap(), x);
}

#[test]
fn moves_keep_h1_and_normal_form() {
    let x = e("SFS(D;(2,1),(3,1)) =[1,2;1,1]= SFS(A;(2,1)) =[0,1;1,0]= SFS(D;(2,1),(2,1))");
    let moves = [
        Move::Transfer { block: 0, first: 0, second: 1, k: 2 },
        Move::ShiftFrom { gluing: 0, fiber: 1, k: -3 },
        Move::ShiftTo { gluing: 0, fiber: 0, k: 2 },
        Move::ShiftTo { gluing: 1, fiber: 1, k: 1 },
        Move::Negate { gluing: 1 },
        Move::RefiberTo { gluing: 1 },
        Move::Reverse,
    ];
    let base = normalize(&x);
    for mv in moves {
        let y = apply_move(&x, mv).unwrap_or_else(|err| panic!("{mv}: {err}"));
        assert!(same_h1(&x, &y), "{mv}");
        assert_eq!(fiber_intersections(&x), fiber_intersections(&y), "{mv}");
        assert_eq!(equivalent(&x, &y), Verdict::Yes, "{mv}: {}", print_expr(&y));
        if mv != Move::Reverse {
            assert_eq!(normalize(&y), base, "{mv}");
        }
    }
}

#[test]
fn vertical_gluings_merge() {
    // Matching fibers: two disks glued along the fiber form an annulus base.
    let x = e("SFS(D;(2,1)) =[-1,0;0,1]= SFS(D;(3,1))");
    assert_eq!(print_expr(&normalize(&x)), print_expr(&normalize(&e("SFS(S2;(2,1),(3,1))"))));
    assert!(same_h1(&x, &normalize(&x)));
}

#[test]
fn solid_torus_fills_neighbour() {
    let x = e("SFS(D;(2,1),(3,1)) =[0,1;1,0]= DxS1");
    let y = e("SFS(D;(2,1),(3,1)) =[0,1;1,0]= SFS(D;)");
    assert!(same_h1(&x, &normalize(&y)));
}

#[test]
fn collar_closes_to_torus_bundle() {
    let x = e("AxS1 /[1,1;1,0]");
    assert!(matches!(normalize(&x), Manifold::TorusBundle(_)));
    assert!(same_h1(&x, &normalize(&x)));
}

#[test]
fn normalize_is_idempotent_on_examples() {
    for s in [
        "SFS(D;(2,1),(3,1)) =[1,2;1,1]= SFS(A;(2,1)) =[0,1;1,0]= SFS(D;(2,1),(2,1))",
        "PxS1 =[0,1;1,0]= PxS1 =[0,1;1,0]= PxS1",
        "SFS(S2;(2,1),(3,1),(7,-6))",
        "L(2,1) # (L(3,1) # S2xS1)",
        "M2(-2) =[-1,0;1,1]= SFS(D;(2,1),(2,1))",
        "TB[3,1;-1,0]",
    ] {
        let once = normalize(&e(s));
        assert_eq!(normalize(&once), once, "{s}");
        assert!(same_h1(&e(s), &once), "{s}");
    }
}
