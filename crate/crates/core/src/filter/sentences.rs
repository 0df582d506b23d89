//! Fast rule-based sentence counting for the abstract-length filter.
//!
//! A boundary is a `.`, `!` or `?` followed by whitespace and then an
//! uppercase letter or a digit, unless the word ending in `.` is a known
//! abbreviation.

const ABBREVIATIONS: &[&str] = &[
    "al", "approx", "ca", "cf", "co", "dr", "e.g", "eq", "fig", "figs", "i.e", "inc", "jr",
    "ltd", "mr", "mrs", "ms", "no", "nos", "prof", "ref", "refs", "resp", "sp", "spp", "sr", "st",
    "viz", "vol", "vs",
];

fn is_abbreviation(word: &str) -> bool {
    let w = word.trim_start_matches(['(', '[', '{', '"', '\'']).to_lowercase();
    ABBREVIATIONS.contains(&w.as_str())
}

/// Number of sentences in `text`; zero only for blank text.
pub fn count_sentences(text: &str) -> usize {
    if text.trim().is_empty() {
        return 0;
    }
    let chars: Vec<char> = text.chars().collect();
    let mut boundaries = 0;
    let mut word_start = 0;
    for (i, &c) in chars.iter().enumerate() {
        if c.is_whitespace() {
            word_start = i + 1;
            continue;
        }
        if !matches!(c, '.' | '!' | '?') {
            continue;
        }
        let mut j = i + 1;
        if j >= chars.len() || !chars[j].is_whitespace() {
            continue;
        }
        while j < chars.len() && chars[j].is_whitespace() {
            j += 1;
        }
        let Some(&next) = chars.get(j) else { continue };
        if !(next.is_uppercase() || next.is_ascii_digit()) {
            continue;
        }
        if c == '.' {
            let word: String = chars[word_start..i].iter().collect();
            if is_abbreviation(&word) {
                continue;
            }
        }
        boundaries += 1;
    }
    boundaries + 1
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        assert_eq!(count_sentences("A b. C d. E f."), 3);
        assert_eq!(count_sentences("one sentence without terminator"), 1);
        assert_eq!(count_sentences("Dr. Smith arrived. He left."), 2);
    }

    #[test]
    fn boundaries_need_capital_or_digit() {
        assert_eq!(count_sentences("values were 0.5 and 1.2 . next one starts lower"), 1);
        assert_eq!(count_sentences("It rose. 56 patients were seen! Why? Because."), 4);
        assert_eq!(count_sentences("Shown in Fig. 2 and (e.g. Table 1). Done."), 2);
        assert_eq!(count_sentences("Smith et al. Reported this. Twice."), 2);
    }

    #[test]
    fn blank_text() {
        assert_eq!(count_sentences(""), 0);
        assert_eq!(count_sentences("   \n"), 0);
    }

    #[test]
    fn pretokenized_terminators() {
        assert_eq!(count_sentences("Most arise from @entity0 . Few studies compare them ."), 2);
    }
}
