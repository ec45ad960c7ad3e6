fn luhn_ok(num: &str) -> bool {
    let digits: Vec<u32> = num.chars().filter_map(|c| c.to_digit(10)).collect();
    let mut total = 0;
    for (pos, d) in digits.iter().rev().enumerate() {
        let mut v = *d;
        if pos % 2 == 1 {
            v *= 2;
            if v > 9 {
                v -= 9;
            }
        }
        total += v;
    }
    total % 10 == 0
}
