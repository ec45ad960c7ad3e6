def build_order(deps):
    indegree = {node: 0 for node in deps}
    for node, needs in deps.items():
        for need in needs:
            indegree[node] += 1
    ready = sorted(node for node, deg in indegree.items() if deg == 0)
    order = []
    while ready:
        node = ready.pop(0)
        order.append(node)
        for other, needs in sorted(deps.items()):
            if node in needs:
                indegree[other] -= 1
                if indegree[other] == 0:
                    ready.append(other)
        ready.sort()
    return order
