use std::collections::HashSet;

use num_rational::BigRational;
use proptest::prelude::*;

use stable_cover::adversary::{RationalLine, RationalPoint};
use stable_cover::dynamic::churn;
use stable_cover::geometry::{assign_points, coverage};
use stable_cover::harness::{parse_stream, write_stream};
use stable_cover::sas::{
    apply_swap, extend_group, make_blocks, partition_groups, prefix_balanced_order, BalanceItem,
};
use stable_cover::{Event, Point, UnitDisk};

fn disk_set() -> impl Strategy<Value = Vec<UnitDisk>> {
    prop::collection::hash_set((0..40i32, 0..40i32), 1..8).prop_map(|s| {
        s.into_iter()
            .map(|(x, y)| UnitDisk::new(x as f64 / 4.0, y as f64 / 4.0))
            .collect()
    })
}

fn rpoint(x: i64, y: i64, d: i64) -> RationalPoint {
    RationalPoint::new(
        BigRational::new(x.into(), d.into()),
        BigRational::new(y.into(), 1.into()),
    )
}

proptest! {
    #[test]
    fn balanced_order_keeps_every_prefix_close(
        raw in prop::collection::vec((0..=4usize, 0..=4usize), 1..30),
        ids in prop::collection::hash_set(0..1000usize, 60),
    ) {
        let bound = 4;
        let mut pairs = raw;
        let mut gap: i64 = pairs.iter().map(|&(a, o)| a as i64 - o as i64).sum();
        while gap != 0 {
            let step = gap.unsigned_abs().min(bound as u64) as usize;
            if gap > 0 {
                pairs.push((0, step));
                gap -= step as i64;
            } else {
                pairs.push((step, 0));
                gap += step as i64;
            }
        }
        prop_assume!(pairs.len() <= ids.len());
        let items: Vec<BalanceItem> = pairs
            .iter()
            .zip(ids.iter())
            .map(|(&(alg, opt), &id)| BalanceItem { id, alg, opt })
            .collect();
        let order = prefix_balanced_order(&items, bound).unwrap();
        let mut sorted = order.clone();
        sorted.sort_unstable();
        let mut expect: Vec<usize> = items.iter().map(|i| i.id).collect();
        expect.sort_unstable();
        prop_assert_eq!(&sorted, &expect);
        prop_assert_eq!(order[0], expect[0]);
        let mut diff: i64 = 0;
        for id in order {
            let it = items.iter().find(|i| i.id == id).unwrap();
            diff += it.alg as i64 - it.opt as i64;
            prop_assert!(diff.unsigned_abs() as usize <= bound);
        }
        prop_assert_eq!(diff, 0);
    }

    #[test]
    fn blocks_tile_the_cells(counts in prop::collection::vec(0..6usize, 0..40), block_min in 1..10usize, extra in 0..10usize) {
        let block_max = 2 * block_min + extra;
        let blocks = make_blocks(&counts, block_min, block_max);
        let mut next = 0;
        let widest = counts.iter().copied().max().unwrap_or(0);
        for (k, b) in blocks.iter().enumerate() {
            prop_assert_eq!(b.start, next);
            prop_assert!(b.end > b.start);
            next = b.end;
            let sum: usize = counts[b.clone()].iter().sum();
            if k + 1 < blocks.len() {
                prop_assert!(sum >= block_min);
                prop_assert!(sum < block_min + widest);
            }
        }
        prop_assert_eq!(next, counts.len());
    }

    #[test]
    fn groups_partition_and_extend(n in 1..60usize, kappa in 1..8usize, shift in 1..9usize, extend in 0..4usize) {
        let i = shift.min(kappa);
        let groups = partition_groups(n, kappa, i);
        let mut next = 0;
        for (k, g) in groups.iter().enumerate() {
            prop_assert_eq!(g.start, next);
            next = g.end;
            let cap = if k == 0 && i > 1 { i - 1 } else { kappa };
            prop_assert!(g.len() <= cap && !g.is_empty());
            let ext = extend_group(g.clone(), n, extend);
            prop_assert!(ext.start <= g.start && ext.end >= g.end && ext.end <= n);
            prop_assert!(ext.len() <= g.len() + extend);
            if n - g.end >= extend {
                prop_assert_eq!(ext.len(), g.len() + extend);
            }
        }
        prop_assert_eq!(next, n);
    }

    #[test]
    fn lowest_index_disk_owns_each_point(disks in disk_set(), raw in prop::collection::vec((0..48i32, 0..48i32), 0..40)) {
        let points: Vec<Point> = raw.iter().map(|&(x, y)| Point::new(x as f64 / 4.0, y as f64 / 4.0)).collect();
        let a = assign_points(&points, &disks);
        for (i, p) in points.iter().enumerate() {
            let first = disks.iter().position(|d| d.covers(p));
            prop_assert_eq!(a.owner(i), first);
        }
        prop_assert_eq!(a.per_disk().iter().sum::<usize>(), a.covered());
        prop_assert_eq!(a.covered(), coverage(&points, &disks));
    }

    #[test]
    fn swap_keeps_m_distinct_disks(current in disk_set(), fresh in disk_set(), picks in prop::collection::vec(any::<prop::sample::Index>(), 0..8)) {
        let m = current.len();
        let s_old: Vec<usize> = picks.iter().map(|ix| ix.index(m)).collect::<HashSet<_>>().into_iter().collect();
        let s_new: Vec<UnitDisk> = fresh.into_iter().take(s_old.len()).collect();
        let next = apply_swap(&current, &s_old, &s_new).unwrap();
        prop_assert_eq!(next.len(), m);
        prop_assert_eq!(next.iter().collect::<HashSet<_>>().len(), m);
        for (k, d) in current.iter().enumerate() {
            if !s_old.contains(&k) {
                prop_assert!(next.contains(d));
            }
        }
        for d in &s_new {
            prop_assert!(next.contains(d));
        }
        prop_assert!(churn(&current, &next) <= 2 * s_old.len());
    }

    #[test]
    fn churn_is_a_symmetric_distance(a in disk_set(), b in disk_set()) {
        prop_assert_eq!(churn(&a, &b), churn(&b, &a));
        prop_assert_eq!(churn(&a, &a), 0);
        prop_assert!(churn(&a, &b) <= a.len() + b.len());
    }

    #[test]
    fn rational_lines_are_normalized(
        p in (-50i64..50, -50i64..50, 1i64..7),
        q in (-50i64..50, -50i64..50, 1i64..7),
        r in (-50i64..50, -50i64..50, 1i64..7),
        k in -9i64..9,
    ) {
        let (p, q, r) = (rpoint(p.0, p.1, p.2), rpoint(q.0, q.1, q.2), rpoint(r.0, r.1, r.2));
        prop_assume!(p != q && k != 0);
        let l = RationalLine::through(&p, &q).unwrap();
        prop_assert!(l.contains(&p) && l.contains(&q));
        let s = BigRational::from_integer(k.into()) / BigRational::from_integer(3.into());
        let scaled = RationalLine::from_coefficients(
            &(BigRational::from_integer(l.a.clone()) * &s),
            &(BigRational::from_integer(l.b.clone()) * &s),
            &(BigRational::from_integer(l.c.clone()) * &s),
        ).unwrap();
        prop_assert_eq!(&scaled, &l);
        prop_assert_eq!(RationalLine::through(&q, &p).unwrap(), l.clone());
        if r != p {
            let m = RationalLine::through(&p, &r).unwrap();
            match l.intersect(&m) {
                Some(x) => prop_assert!(l.contains(&x) && m.contains(&x) && x == p),
                None => prop_assert!(m.contains(&q)),
            }
        }
    }

    #[test]
    fn streams_survive_a_write_parse_cycle(raw in prop::collection::vec((-1e6f64..1e6, -1e6f64..1e6, any::<bool>()), 0..40)) {
        let events: Vec<Event> = raw
            .iter()
            .map(|&(x, y, ins)| {
                let p = Point::new(x, y);
                if ins { Event::Insert(p) } else { Event::Delete(p) }
            })
            .collect();
        prop_assert_eq!(parse_stream(&write_stream(&events)).unwrap(), events);
    }
}
