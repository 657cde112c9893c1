// SPDX-License-Identifier: Apache-2.0

use std::collections::BTreeMap;

use prestige_core::analyze::flow_matrix;
use prestige_core::baselines::{compute_jif3y, considered_citations};
use prestige_core::cocite::{build_cocitation, cosine, CocitationMatrix};
use prestige_core::ingest::{
    build_art_vector, build_citation_matrix, parse_citations, parse_journals, write_citations,
    write_journals,
};
use prestige_core::model::{
    validate_dataset, AreaAttribution, AreaLevel, CitingDocument, Dataset, Journal, JournalId,
    JournalTable, Params, Ref, SubjectScheme,
};
use prestige_core::rank::{run_sjr2, CosineWeighting, EdgeWeighting, UniformWeighting};
use proptest::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

const YEAR: i32 = 2008;

fn below(rng: &mut ChaCha8Rng, k: u64) -> u64 {
    rng.next_u64() % k
}

fn random_dataset(seed: u64, max_n: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = 2 + below(&mut rng, max_n - 1) as usize;
    let mut table = JournalTable::new();
    for k in 0..n {
        let area = ["1101", "1102", "2001", "3301"][below(&mut rng, 4) as usize];
        let mut areas = [area.to_string()]
            .into_iter()
            .collect::<std::collections::BTreeSet<_>>();
        if below(&mut rng, 4) == 0 {
            areas.insert("2002".into());
        }
        let counts: BTreeMap<i32, u64> =
            (YEAR - 4..=YEAR).map(|y| (y, below(&mut rng, 8))).collect();
        table
            .push(Journal {
                id: JournalId::new(format!("J{k:03}")).unwrap(),
                title: format!("Journal {k}"),
                specific_areas: areas,
                citable_docs_by_year: counts,
                ranked: below(&mut rng, 6) != 0,
            })
            .unwrap();
    }
    let mut documents = Vec::new();
    for s in 0..n as u32 {
        for _ in 0..below(&mut rng, 10) {
            let mut refs: Vec<Ref> = (0..1 + below(&mut rng, 6))
                .map(|_| Ref {
                    cited: below(&mut rng, n as u64) as u32,
                    year: YEAR - below(&mut rng, 5) as i32,
                    n: 1 + below(&mut rng, 3) as u32,
                })
                .collect();
            refs.sort_by_key(|r| (r.cited, r.year));
            refs.dedup_by_key(|r| (r.cited, r.year));
            documents.push(CitingDocument {
                source: s,
                year: if below(&mut rng, 8) == 0 {
                    YEAR - 1
                } else {
                    YEAR
                },
                refs,
            });
        }
    }
    let scheme = SubjectScheme::from_code_prefixes(["1101", "1102", "2001", "2002", "3301"]);
    Dataset {
        journals: table,
        documents,
        scheme,
        unknown_ids: Vec::new(),
    }
}

fn shuffled<T: Clone>(items: &[T], seed: u64) -> Vec<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = items.to_vec();
    for i in (1..out.len()).rev() {
        out.swap(i, below(&mut rng, i as u64 + 1) as usize);
    }
    out
}

fn strategy(cosine: bool) -> Box<dyn EdgeWeighting> {
    if cosine {
        Box::new(CosineWeighting)
    } else {
        Box::new(UniformWeighting)
    }
}

fn params(cosine: bool) -> Params {
    Params {
        use_cosine: cosine,
        ..Params::for_year(YEAR)
    }
}

/// Two disjoint copies of `ds`; the copy's ids get a `~copy` suffix.
fn disjoint_double(ds: &Dataset) -> Dataset {
    let n = ds.journals.len() as u32;
    let mut table = ds.journals.clone();
    for j in ds.journals.iter() {
        let mut c = j.clone();
        c.id = JournalId::new(format!("{}~copy", j.id)).unwrap();
        table.push(c).unwrap();
    }
    let mut documents = ds.documents.clone();
    documents.extend(ds.documents.iter().map(|d| {
        CitingDocument {
            source: d.source + n,
            year: d.year,
            refs: d
                .refs
                .iter()
                .map(|r| Ref {
                    cited: r.cited + n,
                    ..*r
                })
                .collect(),
        }
    }));
    Dataset {
        journals: table,
        documents,
        scheme: ds.scheme.clone(),
        unknown_ids: Vec::new(),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn citation_and_cocitation_are_document_order_independent(seed in any::<u64>(), perm in any::<u64>()) {
        let ds = random_dataset(seed, 12);
        let p = params(true);
        let docs = shuffled(&ds.documents, perm);
        prop_assert_eq!(
            build_citation_matrix(&ds.documents, &ds.journals, &p),
            build_citation_matrix(&docs, &ds.journals, &p)
        );
        prop_assert_eq!(
            build_cocitation(&ds.documents, ds.journals.len(), &p),
            build_cocitation(&docs, ds.journals.len(), &p)
        );
    }

    #[test]
    fn scores_are_document_order_independent(seed in any::<u64>(), perm in any::<u64>(), cos in any::<bool>()) {
        let ds = random_dataset(seed, 12);
        let p = params(cos);
        let mut other = ds.clone();
        other.documents = shuffled(&ds.documents, perm);
        let a = run_sjr2(&ds, &p, strategy(cos).as_ref(), None).unwrap();
        let b = run_sjr2(&other, &p, strategy(cos).as_ref(), None).unwrap();
        prop_assert_eq!(a.prestige.values, b.prestige.values);
    }

    #[test]
    fn matrix_conserves_counted_references(seed in any::<u64>()) {
        let ds = random_dataset(seed, 12);
        let p = params(true);
        let expected: u64 = ds
            .documents
            .iter()
            .filter(|d| d.year == YEAR && ds.journals.as_slice()[d.source as usize].ranked)
            .flat_map(|d| &d.refs)
            .filter(|r| p.in_window(r.year))
            .map(|r| r.n as u64)
            .sum();
        prop_assert_eq!(build_citation_matrix(&ds.documents, &ds.journals, &p).total(), expected);
    }

    #[test]
    fn serialization_round_trip_is_a_fixed_point(seed in any::<u64>()) {
        let ds = random_dataset(seed, 12);
        let mut jbuf = Vec::new();
        write_journals(&mut jbuf, &ds.journals).unwrap();
        let table = parse_journals(jbuf.as_slice()).unwrap();
        prop_assert_eq!(&table, &ds.journals);
        let mut cbuf = Vec::new();
        write_citations(&mut cbuf, &ds.documents, &table).unwrap();
        let parsed = parse_citations(cbuf.as_slice(), &table).unwrap();
        prop_assert!(parsed.unknown_ids.is_empty());
        prop_assert_eq!(&parsed.documents, &ds.documents);
        let mut again = Vec::new();
        write_citations(&mut again, &parsed.documents, &table).unwrap();
        prop_assert_eq!(again, cbuf);
    }

    #[test]
    fn cosine_is_symmetric_bounded_and_excludes_mutual_components(
        pairs in prop::collection::vec((0usize..8, 0usize..8, 1u32..20), 0..40),
        i in 0usize..8,
        j in 0usize..8,
        bump in 1u32..50,
    ) {
        let pairs: Vec<_> = pairs.into_iter().filter(|&(a, b, _)| a != b).collect();
        let mut dedup = BTreeMap::new();
        for &(a, b, c) in &pairs {
            dedup.insert((a.min(b), a.max(b)), c);
        }
        let list: Vec<_> = dedup.iter().map(|(&(a, b), &c)| (a, b, c)).collect();
        let m = CocitationMatrix::from_pairs(8, &list);
        prop_assume!(i != j);
        let c_ij = cosine(&m, i, j).unwrap();
        prop_assert_eq!(c_ij.to_bits(), cosine(&m, j, i).unwrap().to_bits());
        prop_assert!((0.0..=1.0).contains(&c_ij));
        let mut changed = dedup.clone();
        *changed.entry((i.min(j), i.max(j))).or_insert(0) += bump;
        let list: Vec<_> = changed.iter().map(|(&(a, b), &c)| (a, b, c)).collect();
        let m2 = CocitationMatrix::from_pairs(8, &list);
        prop_assert_eq!(c_ij.to_bits(), cosine(&m2, i, j).unwrap().to_bits());
    }

    #[test]
    fn disjoint_duplication_leaves_scores_unchanged(seed in any::<u64>(), cos in any::<bool>()) {
        let ds = random_dataset(seed, 10);
        let p = params(cos);
        let a = run_sjr2(&ds, &p, strategy(cos).as_ref(), None).unwrap();
        let b = run_sjr2(&disjoint_double(&ds), &p, strategy(cos).as_ref(), None).unwrap();
        let n = ds.journals.len();
        for i in 0..n {
            match (a.scores.get(i), b.scores.get(i), b.scores.get(i + n)) {
                (Some(x), Some(y), Some(z)) => {
                    prop_assert!((x - y).abs() <= 1e-9, "{} vs {}", x, y);
                    prop_assert!((x - z).abs() <= 1e-9, "{} vs {}", x, z);
                }
                (None, None, None) => {}
                other => prop_assert!(false, "scored set changed: {:?}", other),
            }
        }
    }

    #[test]
    fn engine_invariants(seed in any::<u64>(), cos in any::<bool>()) {
        let ds = random_dataset(seed, 30);
        let p = params(cos);
        let run = run_sjr2(&ds, &p, strategy(cos).as_ref(), None).unwrap();
        let n = ds.journals.len() as f64;
        prop_assert!((run.prestige.sum() - 1.0).abs() <= 1e-12);
        let floor = (1.0 - p.d - p.e) / n;
        prop_assert!(run.prestige.values.iter().all(|&v| v >= floor));
        for (j, i, c) in run.coef.iter() {
            let cji = run.cmat.get(j, i) as f64;
            prop_assert!(c > 0.0 && c <= p.cap_share.min(p.cap_per_citation * cji));
        }
        prop_assert!(run.coef.row_sums().iter().all(|&s| s <= 1.0 + 1e-12));
        // Journals without citable documents keep prestige but get no score.
        let unscored: f64 = run.scores.unscored.iter().map(|&i| run.prestige.values[i]).sum();
        prop_assert!((run.scores.weighted_mean(&run.art) - (1.0 - unscored)).abs() <= 1e-9);
        if run.scores.unscored.is_empty() {
            prop_assert!((run.scores.weighted_mean(&run.art) - 1.0).abs() <= 1e-9);
        }
        let attr = AreaAttribution::build(&ds.journals, &ds.scheme);
        let flows = flow_matrix(&run.flows(), &attr, AreaLevel::Subject);
        prop_assert!(flows.total() + flows.unattributed <= p.d + 1e-9);
    }

    #[test]
    fn baseline_counts_dominate_considered_counts(seed in any::<u64>()) {
        let ds = random_dataset(seed, 15);
        let p = params(true);
        let art = build_art_vector(&ds.journals, &p).unwrap();
        let b = compute_jif3y(&ds.documents, &art, &p);
        let considered = considered_citations(&build_citation_matrix(&ds.documents, &ds.journals, &p));
        prop_assert!(b.citations_3y.iter().zip(&considered).all(|(t, c)| t >= c));
        let in_window: u64 = ds
            .documents
            .iter()
            .filter(|d| d.year == YEAR)
            .flat_map(|d| &d.refs)
            .filter(|r| p.in_window(r.year))
            .map(|r| r.n as u64)
            .sum();
        prop_assert_eq!(b.citations_3y.iter().sum::<u64>(), in_window);
    }

    #[test]
    fn validation_is_idempotent(seed in any::<u64>()) {
        let ds = random_dataset(seed, 15);
        let before = ds.clone();
        let p = params(true);
        let first = validate_dataset(&ds, &p);
        prop_assert_eq!(&first, &validate_dataset(&ds, &p));
        prop_assert_eq!(ds, before);
    }
}
