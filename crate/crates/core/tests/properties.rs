//! Property tests for the dyadic arithmetic and the sweep guarantees.

use proptest::prelude::*;

use runner_sep::{
    bit_index, brute_force_pmax, circ_dist, floor_lg, greedy_isolation_oracle, isolate_t5,
    isolate_t6, isolate_t7, isolate_t8, on_sector_boundary, position, sector_index, t7_bound,
    t8_bound, theorem2_save, verify_time, window_save_detailed, Dyadic, GroupList, OracleConfig,
    SeparationDistance, SpeedSet, TimeVector,
};

fn arb_speeds(max_n: usize, max_speed: u64) -> impl Strategy<Value = SpeedSet> {
    prop::collection::btree_set(1..=max_speed, 1..=max_n)
        .prop_map(|set| SpeedSet::new(set.into_iter().collect()).unwrap())
}

fn arb_tv(scale: u32) -> impl Strategy<Value = TimeVector> {
    (0..(1u64 << scale)).prop_map(move |num| TimeVector::from_numerator(num, scale).unwrap())
}

proptest! {
    #[test]
    fn speed_factors_as_odd_times_power(s in 1u64..=(1 << 20)) {
        let e = bit_index(s).unwrap().value();
        let odd = s >> (e - 1);
        prop_assert_eq!(odd % 2, 1);
        prop_assert_eq!(odd << (e - 1), s);
    }

    #[test]
    fn position_is_linear_over_bits((s, tv) in (1u64..=4096, arb_tv(12))) {
        // accumulate the single-bit contributions mod 1
        let scale = tv.scale();
        let modulus = 1u128 << scale;
        let mut acc = 0u128;
        for j in 1..=scale {
            if tv.bit(j) {
                let single = TimeVector::single_bit(scale, j).unwrap();
                acc = (acc + position(s, &single).numerator() as u128) % modulus;
            }
        }
        prop_assert_eq!(acc as u64, position(s, &tv).numerator());
    }

    #[test]
    fn bits_below_the_index_do_not_move((s, tv) in (1u64..=4096, arb_tv(14))) {
        let e = bit_index(s).unwrap().value();
        let base = position(s, &tv);
        for j in 1..e.min(tv.scale() + 1) {
            let flipped = tv.with_bit(j, !tv.bit(j)).unwrap();
            prop_assert_eq!(position(s, &flipped), base);
        }
    }

    #[test]
    fn flipping_the_index_bit_moves_half((s, tv) in (1u64..=8192, arb_tv(14))) {
        let e = bit_index(s).unwrap().value();
        prop_assume!(e <= tv.scale());
        let flipped = tv.with_bit(e, !tv.bit(e)).unwrap();
        prop_assert_eq!(position(s, &flipped), position(s, &tv).antipode());
    }

    #[test]
    fn sector_parity_flips_only_at_the_window_column(
        (s, tv, k_off, j) in (1u64..=1024, arb_tv(14), 0u32..8, 1u32..=14)
    ) {
        let e = bit_index(s).unwrap().value();
        let k = e + k_off;
        prop_assume!(k <= tv.scale() && j <= k);
        let u = k - e + 1;
        let before = position(s, &tv);
        let after = position(s, &tv.with_bit(j, !tv.bit(j)).unwrap());
        let odd_before = sector_index(before, u).unwrap() % 2 == 1;
        let odd_after = sector_index(after, u).unwrap() % 2 == 1;
        if j < k {
            // coarser bits shift by a whole (even) number of sectors
            prop_assert_eq!(odd_before, odd_after);
        } else if on_sector_boundary(before, u).unwrap() {
            // boundary points stay boundary points and tie to the odd side
            prop_assert!(on_sector_boundary(after, u).unwrap());
            prop_assert!(odd_before && odd_after);
        } else {
            prop_assert_ne!(odd_before, odd_after);
        }
    }

    #[test]
    fn odd_sector_implies_distance((tv, u) in (arb_tv(12), 1u32..=10)) {
        let pos = position(1, &tv); // identity: the raw grid point
        if sector_index(pos, u).unwrap() % 2 == 1 {
            prop_assert!(circ_dist(pos) >= Dyadic::new(1, u + 1));
        }
    }

    #[test]
    fn antipodal_distances_cover_half(tv in arb_tv(12)) {
        let pos = position(1, &tv);
        let a = circ_dist(pos);
        let b = circ_dist(pos.antipode());
        // exact: a + b >= 1/2, hence max(a, b) >= 1/4
        let lhs = ((a.numerator() as u128) << b.scale()) + ((b.numerator() as u128) << a.scale());
        let rhs = 1u128 << (a.scale() + b.scale() - 1);
        prop_assert!(lhs >= rhs);
        prop_assert!(a.max(b) >= Dyadic::new(1, 2));
    }

    #[test]
    fn majority_sweep_saves_half(speeds in arb_speeds(12, 4095)) {
        let n = speeds.len();
        let report = theorem2_save(&speeds).unwrap();
        prop_assert!(report.saved_count() >= n.div_ceil(2));
        for &i in &report.saved {
            prop_assert!(report.distances[i - 1].at_least(SeparationDistance::quarter()));
        }
        report.verify(&speeds).unwrap();
    }

    #[test]
    fn majority_sweep_groups_do_not_interfere(speeds in arb_speeds(10, 4095)) {
        let report = theorem2_save(&speeds).unwrap();
        let witness = report.witness;
        for group in GroupList::descending(&speeds).iter() {
            let e = group.bit_index.value();
            // clear every bit below the group's index; positions must agree
            let mut masked = witness;
            for j in 1..e {
                masked.set_bit(j, false).unwrap();
            }
            for &i in &group.members {
                let s = speeds.speed(i).unwrap();
                prop_assert_eq!(position(s, &masked), position(s, &witness));
            }
        }
    }

    #[test]
    fn window_sweep_bound_and_permanence(
        (speeds, c) in (arb_speeds(24, 1 << 16), 2u32..=5)
    ) {
        let n = speeds.len();
        let run = window_save_detailed(&speeds, c).unwrap();
        run.report.verify(&speeds).unwrap();
        for step in &run.steps {
            prop_assert!(step.newly_saved.len() >= step.window.len().div_ceil(2));
        }
        for (&i, save) in &run.saved_at {
            prop_assert!(save.resolution >= 1 && save.resolution < c);
            let pos = position(speeds.speed(i).unwrap(), &run.report.witness);
            prop_assert_eq!(sector_index(pos, save.resolution).unwrap() % 2, 1);
            prop_assert!(circ_dist(pos) >= Dyadic::new(1, save.resolution + 1));
            prop_assert!(circ_dist(pos).at_least(run.report.guarantee));
        }
        if c <= floor_lg(n as u64) {
            prop_assert!(run.report.guaranteed);
            prop_assert!(run.report.unsaved_count() <= (n - 1) / c as usize);
        } else {
            prop_assert!(!run.report.guaranteed);
        }
    }

    #[test]
    fn isolation_schedules_partition_and_terminate(speeds in arb_speeds(16, 1 << 12)) {
        let n = speeds.len();
        let mut traces = vec![
            isolate_t5(&speeds).unwrap(),
            isolate_t6(&speeds).unwrap(),
            isolate_t8(&speeds).unwrap(),
        ];
        if n >= 4 {
            traces.push(isolate_t7(&speeds).unwrap());
        }
        for trace in &traces {
            trace.verify(&speeds).unwrap();
            trace.check_guarantees(&speeds).unwrap();
            prop_assert!(trace.step_count() <= n);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn oracle_dominates_constructive_counts(speeds in arb_speeds(8, 255)) {
        let n = speeds.len();
        let p = speeds.max_bit_index().value();
        let config = OracleConfig::default();

        let quarter = SeparationDistance::quarter();
        let oracle = brute_force_pmax(&speeds, quarter, p, &config).unwrap();
        let sweep = theorem2_save(&speeds).unwrap();
        prop_assert!(oracle.max_saved >= sweep.saved_count());
        prop_assert!(oracle.max_saved >= n.div_ceil(2));
        prop_assert_eq!(
            verify_time(&speeds, &oracle.witness, quarter).len(),
            oracle.max_saved
        );

        for c in 2..=floor_lg(n.max(1) as u64) {
            let d = SeparationDistance::new(c).unwrap();
            let window = window_save_detailed(&speeds, c).unwrap();
            let oracle = brute_force_pmax(&speeds, d, p + c - 2, &config).unwrap();
            prop_assert!(oracle.max_saved >= window.report.saved_count());
            prop_assert!(oracle.max_saved >= n - (n - 1) / c as usize);
        }
    }

    #[test]
    fn greedy_oracle_needs_no_more_steps(speeds in arb_speeds(5, 128)) {
        let n = speeds.len();
        let p = speeds.max_bit_index().value();
        let config = OracleConfig::default();

        let t5 = isolate_t5(&speeds).unwrap();
        let at_half =
            greedy_isolation_oracle(&speeds, SeparationDistance::half(), p, &config).unwrap();
        at_half.verify(&speeds).unwrap();
        prop_assert!(at_half.step_count() <= t5.step_count());

        let t6 = isolate_t6(&speeds).unwrap();
        let at_quarter =
            greedy_isolation_oracle(&speeds, SeparationDistance::quarter(), p, &config).unwrap();
        at_quarter.verify(&speeds).unwrap();
        prop_assert!(at_quarter.step_count() <= t6.step_count());

        if n >= 4 {
            let c = floor_lg(n as u64);
            let d = SeparationDistance::new(c).unwrap();
            let t7 = isolate_t7(&speeds).unwrap();
            let at_c = greedy_isolation_oracle(&speeds, d, p + c - 2, &config).unwrap();
            prop_assert!(at_c.step_count() <= t7.step_count());
        }
    }
}

/// Worst-case chain oracle for the schedule bounds: `chain(n)` is the most
/// steps any run can take when every step saves only its guaranteed minimum,
/// maximized over all compliant survivor counts.
fn worst_chain(n: u64, cache: &mut Vec<Option<u64>>) -> u64 {
    if n == 0 {
        return 0;
    }
    if let Some(v) = cache[n as usize] {
        return v;
    }
    let worst_next = match n {
        1 | 2 => 0, // a single sweep clears one or two survivors
        3 => 1,     // a sweep on three may strand one
        _ => (n - 1) / floor_lg(n) as u64,
    };
    let steps = 1
        + (0..=worst_next)
            .map(|k| worst_chain(k, cache))
            .max()
            .unwrap();
    cache[n as usize] = Some(steps);
    steps
}

#[test]
fn adaptive_bound_tops_every_compliant_chain() {
    let mut cache = vec![None; 4097];
    for n in 8u64..=4096 {
        let cap = t8_bound(n).unwrap().ceil() as u64;
        let worst = worst_chain(n, &mut cache);
        assert!(
            worst <= cap,
            "n = {n}: worst compliant chain {worst} exceeds cap {cap}"
        );
    }
}

#[test]
fn fixed_c_bound_tops_every_compliant_chain() {
    // chain under a fixed divisor c: n -> floor((n-1)/c) at worst
    for n in 4u64..=4096 {
        let c = floor_lg(n);
        let cap = t7_bound(n).unwrap().ceil() + 1.0;
        let mut steps = 0u64;
        let mut v = n;
        while v > 0 {
            v = (v - 1) / c as u64;
            steps += 1;
        }
        assert!(
            (steps as f64) <= cap,
            "n = {n}, c = {c}: worst chain {steps} exceeds cap {cap}"
        );
    }
}
