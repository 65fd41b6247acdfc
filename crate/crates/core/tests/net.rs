use std::f64::consts::PI;
use std::fs;

use so3round::net::{
    build_net, covering_check, load, nearest_linear, save, Net, NetConfig, StopRule,
};
use so3round::rng::stream;
use so3round::so3::{haar_sample, Rotation};
use so3round::Error;

#[test]
fn greedy_net_is_separated() {
    let net = build_net(0.6, 7, 2000).unwrap();
    assert!(net.len() > 10);
    assert!(net.separation_violations().is_empty());
    assert!(net.min_pairwise_distance().unwrap() >= 0.6);
}

#[test]
fn saturated_net_covers() {
    let net = Net::build(&NetConfig::new(0.6, 3)).unwrap();
    assert!(net.separation_violations().is_empty());
    let cover = covering_check(&net, 50_000, 99).unwrap();
    assert!(cover.pass, "{cover:?}");
}

#[test]
fn oversized_delta_gives_one_point() {
    let net = build_net(3.0, 1, 100).unwrap();
    assert_eq!(net.len(), 1);
    assert_eq!(net.min_pairwise_distance(), None);
}

#[test]
fn invalid_parameters_are_rejected() {
    assert!(matches!(build_net(0.0, 1, 10), Err(Error::InvalidInput(_))));
    assert!(matches!(
        build_net(f64::NAN, 1, 10),
        Err(Error::InvalidInput(_))
    ));
    assert!(matches!(build_net(0.5, 1, 0), Err(Error::InvalidInput(_))));
    let cfg = NetConfig {
        stop: StopRule::Fixed(0),
        ..NetConfig::new(0.5, 1)
    };
    assert!(Net::build(&cfg).is_err());
}

#[test]
fn construction_is_deterministic() {
    let a = Net::build(&NetConfig::new(0.7, 12)).unwrap();
    let b = Net::build(&NetConfig::new(0.7, 12)).unwrap();
    let c = Net::build(&NetConfig::new(0.7, 13)).unwrap();
    assert_eq!(a.points(), b.points());
    assert_ne!(a.points(), c.points());
}

#[test]
fn equidistant_query_takes_lowest_index() {
    let net = Net::from_points(
        0.5,
        0,
        vec![Rotation::about_z(0.4), Rotation::about_z(-0.4)],
    )
    .unwrap();
    assert_eq!(net.nn_query(&Rotation::IDENTITY).unwrap().0, 0);
    let swapped = Net::from_points(
        0.5,
        0,
        vec![Rotation::about_z(-0.4), Rotation::about_z(0.4)],
    )
    .unwrap();
    assert_eq!(swapped.nn_query(&Rotation::IDENTITY).unwrap().0, 0);
}

#[test]
fn nearest_point_distance_zero_on_net_points() {
    let net = build_net(0.5, 2, 500).unwrap();
    for (i, p) in net.points().iter().enumerate() {
        let (k, d) = net.nn_query(p).unwrap();
        assert_eq!(k, i);
        assert!(d < 1e-12);
    }
}

#[test]
fn index_matches_linear_scan() {
    let net = build_net(0.45, 5, 1000).unwrap();
    let mut rng = stream(77, 0);
    for _ in 0..3000 {
        let g = haar_sample(&mut rng);
        assert_eq!(
            net.nn_query(&g).unwrap(),
            nearest_linear(net.points(), &g).unwrap()
        );
    }
    // antipodal quaternion corners exercise the doubled point set
    let corner = Rotation::about_x(PI);
    assert_eq!(
        net.nn_query(&corner).unwrap(),
        net.nn_query_linear(&corner).unwrap()
    );
}

#[test]
fn range_query_matches_brute_force() {
    let net = build_net(0.5, 8, 500).unwrap();
    let mut rng = stream(1, 0);
    for _ in 0..200 {
        let g = haar_sample(&mut rng);
        let expect: Vec<usize> = (0..net.len())
            .filter(|&i| net.points()[i].distance(&g) <= 0.8)
            .collect();
        assert_eq!(net.within(&g, 0.8), expect);
    }
}

#[test]
fn empty_net_queries_fail() {
    let net = Net::from_points(0.3, 0, Vec::new()).unwrap();
    assert!(matches!(
        net.nn_query(&Rotation::IDENTITY),
        Err(Error::State(_))
    ));
    assert!(net.point(0).is_err());
}

#[test]
fn save_load_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("net.txt");
    let net = Net::build(&NetConfig::new(0.8, 4)).unwrap();
    save(&net, &path).unwrap();
    let back = load(&path).unwrap();
    assert_eq!(back.points(), net.points());
    assert_eq!(back.delta(), net.delta());
    assert_eq!(back.seed(), net.seed());
}

#[test]
fn truncated_file_is_a_parse_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("net.txt");
    save(&build_net(0.8, 4, 300).unwrap(), &path).unwrap();
    let text = fs::read_to_string(&path).unwrap();
    let cut: Vec<&str> = text.lines().collect();
    fs::write(&path, cut[..cut.len() - 2].join("\n")).unwrap();
    assert!(matches!(load(&path), Err(Error::Parse { .. })));
    fs::write(
        &path,
        text.replacen("format_version 1", "format_version x", 1),
    )
    .unwrap();
    assert!(matches!(load(&path), Err(Error::Parse { .. })));
}

#[test]
fn unseparated_file_is_an_integrity_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("net.txt");
    let close = Net::from_points(0.5, 0, vec![Rotation::IDENTITY, Rotation::about_z(0.1)]).unwrap();
    save(&close, &path).unwrap();
    assert!(matches!(load(&path), Err(Error::Integrity(_))));
}

#[test]
fn missing_file_is_an_io_error() {
    assert!(matches!(
        load(std::path::Path::new("/nonexistent/net.txt")),
        Err(Error::Io(_))
    ));
}
