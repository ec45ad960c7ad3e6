fn best_value(items: &[(usize, u32)], capacity: usize) -> u32 {
    let mut table = vec![0u32; capacity + 1];
    for &(weight, value) in items {
        for cap in (weight..=capacity).rev() {
            table[cap] = table[cap].max(table[cap - weight] + value);
        }
    }
    table[capacity]
}
