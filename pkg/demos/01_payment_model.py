# Payment model on a two-request toy instance: one provider offering a fast
# and a slow service, two identical requests competing for them.
from fairselect import (
    Request,
    Scenario,
    Service,
    assignment_payment,
    enumerate_feasible,
    lex_compare,
    payment_vector,
    total_revenue,
)

pool = (Service(0, 0, qos=1.0), Service(0, 1, qos=3.0))
requests = (
    Request(0, frozenset({0}), base_payment=1.0, max_bonus=1.0, qos_baseline=2.0),
    Request(1, frozenset({0}), base_payment=1.0, max_bonus=1.0, qos_baseline=2.0),
)
scenario = Scenario(providers=(pool,), requests=requests)

# payment = base + bonus * (1 - qos / baseline); faster service pays more
for service in pool:
    print(f"service {service.service_id} (qos {service.qos}):",
          f"payment {assignment_payment(requests[0], service, selected=True):.2f}")
print()

# each feasible plan assigns distinct services; compare their payment vectors
plans = list(enumerate_feasible(scenario))
print(f"{len(plans)} feasible plans")
for plan in plans:
    vec = payment_vector(plan, scenario)
    print(f"  choices {dict(sorted(plan.choices.items()))}"
          f"  sorted payments {vec.sorted_view}  revenue {total_revenue(plan, scenario):.2f}")

# the fair optimum maximizes the sorted vector lexicographically from the
# bottom; here every plan gives the same multiset, so all are co-optimal
best = plans[0]
for plan in plans[1:]:
    if lex_compare(payment_vector(plan, scenario).sorted_view,
                   payment_vector(best, scenario).sorted_view) > 0:
        best = plan
print(f"\nmax-min fair sorted vector: {payment_vector(best, scenario).sorted_view}")
