fn invoice_cents(items: &[(u64, u64)], tax_percent: u64) -> u64 {
    let subtotal: u64 = items.iter().map(|(price, qty)| price * qty).sum();
    subtotal + subtotal * tax_percent / 100
}
