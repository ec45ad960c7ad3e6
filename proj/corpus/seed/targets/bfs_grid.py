def shortest_path(grid):
    rows, cols = len(grid), len(grid[0])
    frontier = [(0, 0, 0)]
    seen = {(0, 0)}
    while frontier:
        r, c, dist = frontier.pop(0)
        if (r, c) == (rows - 1, cols - 1):
            return dist
        for dr, dc in ((1, 0), (-1, 0), (0, 1), (0, -1)):
            nr, nc = r + dr, c + dc
            if 0 <= nr < rows and 0 <= nc < cols and grid[nr][nc] == "." and (nr, nc) not in seen:
                seen.add((nr, nc))
                frontier.append((nr, nc, dist + 1))
    return -1
