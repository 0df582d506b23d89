macro_rules! example {
    ($test:ident, $module:ident, $file:literal) => {
        #[allow(dead_code)]
        #[path = $file]
        mod $module;

        #[test]
        fn $test() {
            $module::run_example().expect(concat!($file, " should run"));
        }
    };
}

example!(parse_pubtator_runs, parse_pubtator, "../examples/parse_pubtator.rs");
example!(fetch_corpus_runs, fetch_corpus, "../examples/fetch_corpus.rs");
example!(build_dataset_runs, build_dataset, "../examples/build_dataset.rs");
example!(dataset_stats_runs, dataset_stats, "../examples/dataset_stats.rs");
example!(baselines_runs, baselines, "../examples/baselines.rs");
example!(significance_runs, significance, "../examples/significance.rs");
example!(agreement_runs, agreement, "../examples/agreement.rs");
