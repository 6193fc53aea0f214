mod common;

use cmq::cmbuild::Builder;
use common::*;

#[test]
fn two_particles() {
    let ring = generic_ring(2);
    for m in m_samples() {
        let mut b = Builder::new(&ring, &m).unwrap();
        let i = b.i().unwrap();
        assert_eq!(i, golden_i2(&ring, &m, 1, 2), "m = {m}");
        assert_eq!(i.len(), 3);
    }
}

#[test]
fn three_particles() {
    let ring = generic_ring(3);
    for m in m_samples() {
        let mut b = Builder::new(&ring, &m).unwrap();
        let i = b.i().unwrap();
        assert_eq!(i, golden_i3(&ring, &m), "m = {m}");
        assert_eq!(i, golden_i3_recursive(&ring, &m), "m = {m}");
    }
}

#[test]
fn four_particles() {
    let ring = generic_ring(4);
    for m in m_samples() {
        let mut b = Builder::new(&ring, &m).unwrap();
        let i = b.i().unwrap();
        assert_eq!(i, golden_i4(&ring, &m), "m = {m}\n{}", &i - &golden_i4(&ring, &m));
        assert_eq!(i, golden_i4_recursive(&ring, &m), "m = {m}");
    }
}

#[test]
fn non_deformed_limit_is_symmetric() {
    // at m = 1 every particle is alike, so I is invariant under relabelling 1 ↔ 2
    let ring = generic_ring(3);
    let mut b = Builder::new(&ring, &cmq::ring::int(1)).unwrap();
    let i = b.i().unwrap();
    let expected = sum(&[
        d(&ring, &[1, 2, 3]),
        p(&ring, 2, 3).scale(&cmq::ring::int(2)).compose(&d(&ring, &[1])),
        p(&ring, 1, 3).scale(&cmq::ring::int(2)).compose(&d(&ring, &[2])),
        p(&ring, 1, 2).scale(&cmq::ring::int(2)).compose(&d(&ring, &[3])),
    ]);
    assert_eq!(i, expected);
}
