use std::collections::BTreeMap;

fn top_word(text: &str) -> String {
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    for word in text.split_whitespace() {
        *counts.entry(word.to_lowercase()).or_insert(0) += 1;
    }
    let mut best = String::new();
    let mut best_count = 0;
    for (word, count) in &counts {
        if *count > best_count {
            best = word.clone();
            best_count = *count;
        }
    }
    best
}
