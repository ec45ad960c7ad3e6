use std::collections::HashMap;

fn lswr(s: &str) -> usize {
    let mut char_index_map: HashMap<char, usize> = HashMap::new();
    let mut longest: usize = 0;
    let mut start: usize = 0;
    for (end, ch) in s.chars().enumerate() {
        if let Some(&prev) = char_index_map.get(&ch) {
            if prev >= start {
                start = prev + 1;
            }
        }
        char_index_map.insert(ch, end);
        longest = longest.max(end - start + 1);
    }
    longest
}
