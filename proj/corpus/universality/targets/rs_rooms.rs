fn rooms_needed(meetings: &[(u32, u32)]) -> i32 {
    let mut events: Vec<(u32, i32)> = Vec::new();
    for &(begin, finish) in meetings {
        events.push((begin, 1));
        events.push((finish, -1));
    }
    events.sort();
    let mut active = 0;
    let mut peak = 0;
    for (_, delta) in events {
        active += delta;
        peak = peak.max(active);
    }
    peak
}
