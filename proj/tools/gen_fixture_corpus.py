#!/usr/bin/env python3
"""Generate the synthetic 25-document fixture corpus, its gold manifest and scripted model responses.

Run from the repository root:
    python3 tools/gen_fixture_corpus.py fixtures/corpus
then record the replay store with the fixture_recorder test tool.
"""

import json
import random
import sys
from pathlib import Path

SEED = 20240611

APPS = [
    ("FitTrack", "fitness tracker"),
    ("ShopLane", "shopping marketplace"),
    ("ChatNest", "group messaging app"),
    ("MediMinder", "medication reminder"),
    ("RideShareGo", "ride hailing service"),
    ("PhotoVault", "photo backup tool"),
    ("BudgetBee", "personal finance manager"),
    ("StudyBuddy", "study planner"),
    ("SafeWalk", "personal safety companion"),
    ("TuneStream", "music streaming app"),
]

# (file type, count, filename pool)
LAYOUT = [
    ("software_code_spec", 8, ["AccountService.java", "sync_worker.py", "api_spec.md", "PaymentController.kt",
                               "analytics_client.ts", "location_provider.py", "NotificationHandler.swift",
                               "upload_manager.go"]),
    ("user_developer_guide", 9, ["user_guide.md", "developer_guide.md", "getting_started_guide.md",
                                 "admin_guide.md", "integration_guide.md", "faq_guide.md", "privacy_guide.md",
                                 "setup_guide.txt", "support_guide.md"]),
    ("architecture_db_design", 6, ["architecture.md", "schema.sql", "data_model.md", "system_design.md",
                                   "database_design.md", "architecture_overview.txt"]),
    ("readme", 2, ["README.md", "README.txt"]),
]

# Response 0 story-line counts per file type (sum 120).
RESPONSE0_LINES = {
    "software_code_spec": [5, 5, 5, 5, 5, 5, 5, 6],
    "user_developer_guide": [6, 6, 6, 6, 6, 6, 6, 6, 7],
    "architecture_db_design": [3, 3, 3, 3, 2, 2],
    "readme": [4, 4],
}
MATCHED_TOTAL = 57

ACTIONS = ["Collect", "Process", "Share"]

DATA_TYPE_PHRASES = {
    "Approximate Location": "the coarse city-level location of the device",
    "Precise Location": "GPS coordinates reported by the device",
    "Name": "the full name entered at sign-up",
    "Email Address": "the email address used to register",
    "User IDs": "an internal account identifier",
    "Phone Number": "the mobile number used for verification",
    "Date of Birth": "the birth date entered in the profile",
    "Payment Information": "card details passed to the payment gateway",
    "Purchase History": "past orders and receipts",
    "Fitness Information": "step counts and workout sessions",
    "Medical Records": "uploaded medical records",
    "Prescriptions": "the prescriptions a user schedules",
    "In-App Messages": "chat messages between members",
    "Photos": "photos selected from the gallery",
    "Voice Recordings": "short voice notes",
    "Contacts": "the address book on the phone",
    "Usage Data": "screen views and button taps",
    "Search History": "queries typed into the search bar",
    "App Interactions": "how people move through the app",
    "Crash Logs": "stack traces captured after a crash",
    "Diagnostics": "battery and memory diagnostics",
    "IP Address": "the IP address of each request",
    "Advertising ID": "the advertising identifier of the device",
    "Calendar Events": "calendar entries the user imports",
}

PURPOSE_PHRASES = {
    "Account Management": "to create and maintain the user account",
    "Authentication": "to verify who is signing in",
    "Customer Support": "to answer support tickets",
    "Payment Processing": "to complete purchases",
    "Data Synchronization": "to keep devices in sync",
    "Notifications": "to send reminders and alerts",
    "Backup": "to restore content on a new phone",
    "Usage Analytics": "to understand which features are used",
    "Performance Monitoring": "to find slow screens and crashes",
    "Targeted Advertising": "to show relevant ads",
    "Marketing Communications": "to send newsletters",
    "Fraud Prevention": "to block fraudulent transactions",
    "Security Monitoring": "to detect suspicious logins",
    "Legal Compliance": "to meet record keeping obligations",
    "Recommendations": "to suggest content the user may like",
    "Emergency Response": "to alert trusted contacts in an emergency",
    "Health Monitoring": "to track health trends over time",
    "Social Features": "to let friends see shared activity",
}

# Valid labels a model might emit that are not part of this document's gold.
DISTRACTOR_DATA = ["Diagnostics", "IP Address", "Crash Logs", "Advertising ID", "Calendar Events"]
DISTRACTOR_PURPOSES = ["Performance Monitoring", "Targeted Advertising", "Research", "Product Updates"]
HALLUCINATED_DATA = ["Biometric Aura", "Mood Vectors", "Social Graph Fingerprint"]
HALLUCINATED_PURPOSES = ["Engagement Optimization", "Vibe Tuning"]

FILLER = [
    "The module follows the layered design used across the rest of the codebase.",
    "Configuration values are read once at startup and cached for the session.",
    "Errors are reported to the caller and retried with exponential backoff.",
    "All network calls go through the shared HTTP client with TLS enabled.",
    "Feature flags gate the rollout of new screens to a small share of users.",
    "Unit tests cover the happy path and the most common failure modes.",
    "The release train ships a new version every two weeks.",
    "Accessibility labels are provided for every interactive element.",
    "Localization strings live in a separate resource bundle.",
    "The team reviews every change before it is merged.",
]


def join_list(items):
    if len(items) == 1:
        return items[0]
    return ", ".join(items[:-1]) + " and " + items[-1]


def story_line(action, data, purposes):
    return f"We {action.lower()} {join_list(data)} for {join_list(purposes)}."


def story_key(s):
    return (s["action"].lower(), frozenset(d.lower() for d in s["data_types"]),
            frozenset(p.lower() for p in s["purposes"]))


def make_gold(rng, n_data, n_purposes, n_stories):
    actions = sorted(rng.sample(ACTIONS, 2), key=ACTIONS.index)
    data = rng.sample(sorted(DATA_TYPE_PHRASES), n_data)
    purposes = rng.sample(sorted(PURPOSE_PHRASES), n_purposes)
    stories, seen = [], set()
    # Every gold label shows up in at least one story.
    while len(stories) < n_stories:
        s = {
            "action": rng.choice(actions),
            "data_types": rng.sample(data, rng.choice([1, 1, 2])),
            "purposes": rng.sample(purposes, rng.choice([1, 1, 2])),
        }
        if story_key(s) in seen:
            continue
        seen.add(story_key(s))
        stories.append(s)
    used_d = {d for s in stories for d in s["data_types"]}
    used_p = {p for s in stories for p in s["purposes"]}
    used_a = {s["action"] for s in stories}
    if used_d != set(data) or used_p != set(purposes) or used_a != set(actions):
        return None
    return {"actions": actions, "data_types": data, "purposes": purposes, "stories": stories}


def document_text(rng, app, kind, file_type, filename, gold):
    name, blurb = app
    lines = []
    data_sentences = [f"{name} handles {DATA_TYPE_PHRASES[d]}." for d in gold["data_types"]]
    purpose_sentences = [f"This information is used {PURPOSE_PHRASES[p]}." for p in gold["purposes"]]
    behavior = []
    for s in gold["stories"]:
        d = join_list([DATA_TYPE_PHRASES[x] for x in s["data_types"]])
        p = " and ".join(PURPOSE_PHRASES[x] for x in s["purposes"])
        verb = {"Collect": "collects", "Process": "processes", "Share": "shares with partners"}[s["action"]]
        behavior.append(f"The {kind} {verb} {d} {p}.")
    filler = rng.sample(FILLER, 4)
    if file_type == "software_code_spec":
        comment = "#" if filename.endswith((".py",)) else "//"
        if filename.endswith(".md"):
            lines += [f"# {name} API specification", "", f"{name} is a {blurb}.", ""]
            lines += ["## Endpoints", "", "POST /v1/profile", "GET /v1/activity", ""]
            lines += [f"- {b}" for b in behavior] + [""] + filler
        else:
            lines += [f"{comment} {name}: {kind} for the {blurb}"]
            lines += [f"{comment} {x}" for x in data_sentences + purpose_sentences]
            for i, b in enumerate(behavior):
                lines += [f"{comment} {b}", f"function step{i}(request) {{ return pipeline.handle(request); }}"]
            lines += [f"{comment} {x}" for x in filler]
    elif file_type == "architecture_db_design":
        if filename.endswith(".sql"):
            lines += [f"-- {name} database schema ({blurb})"]
            lines += [f"-- {x}" for x in data_sentences + purpose_sentences + behavior]
            lines += ["CREATE TABLE users (id BIGINT PRIMARY KEY, created_at TIMESTAMP);",
                      "CREATE TABLE events (id BIGINT PRIMARY KEY, user_id BIGINT, payload TEXT);"]
            lines += [f"-- {x}" for x in filler]
        else:
            lines += [f"# {name} architecture", "", f"{name} is a {blurb} built from small services.", ""]
            lines += data_sentences + [""] + behavior + [""] + purpose_sentences + [""] + filler
    elif file_type == "readme":
        lines += [f"# {name}", "", f"{name} is an open source {blurb}.", "", "## Features", ""]
        lines += [f"- {b}" for b in behavior] + ["", "## Building", "", "Run the build script and open the app."]
        lines += [""] + filler[:2]
    else:
        title = filename.rsplit(".", 1)[0].replace("_", " ").title()
        lines += [f"# {name} {title}", "", f"Welcome to {name}, a {blurb}.", ""]
        lines += data_sentences + [""] + behavior + [""] + purpose_sentences + [""] + filler
    return "\n".join(lines) + "\n"


def response_text(rng, doc_id, gold, n_lines, n_matched, variant):
    matched = rng.sample(gold["stories"], n_matched)
    gold_keys = {story_key(s) for s in gold["stories"]}
    lines = []
    for s in matched:
        d = list(s["data_types"])
        if len(d) > 1 and rng.random() < 0.5:
            d.reverse()
        lines.append(story_line(s["action"], d, s["purposes"]))
    extra_data, extra_purposes = [], []
    hallucinated = False
    while len(lines) < n_lines:
        roll = rng.random()
        action = rng.choice(gold["actions"])
        if roll < 0.2 and not hallucinated:
            h = rng.choice(HALLUCINATED_DATA)
            lines.append(story_line(action, [h], [rng.choice(gold["purposes"])]))
            extra_data.append(h)
            hallucinated = True
            continue
        if roll < 0.3:
            h = rng.choice(HALLUCINATED_PURPOSES)
            lines.append(story_line(action, [rng.choice(gold["data_types"])], [h]))
            extra_purposes.append(h)
            continue
        d = [rng.choice(gold["data_types"] + DISTRACTOR_DATA)]
        p = [rng.choice(gold["purposes"] + DISTRACTOR_PURPOSES)]
        s = {"action": action, "data_types": d, "purposes": p}
        if story_key(s) in gold_keys or any(l == story_line(action, d, p) for l in lines):
            continue
        lines.append(story_line(action, d, p))
        for x in d:
            if x not in gold["data_types"]:
                extra_data.append(x)
        for x in p:
            if x not in gold["purposes"]:
                extra_purposes.append(x)
    rng.shuffle(lines)

    actions = list(gold["actions"])
    data = [d for d in gold["data_types"] if rng.random() < 0.85] + extra_data
    purposes = [p for p in gold["purposes"] if rng.random() < 0.85] + extra_purposes
    # Parent labels stand in for their children now and then.
    data = ["App Interactions" if d == "Usage Data" and rng.random() < 0.6 else d for d in data]
    purposes = ["Analytics" if p == "Usage Analytics" and rng.random() < 0.5 else p for p in purposes]
    data = list(dict.fromkeys(data))
    purposes = list(dict.fromkeys(purposes))
    bullet = "- " if rng.random() < 0.3 else ""
    case = (lambda s: s.lower()) if rng.random() < 0.2 else (lambda s: s)

    out = []
    if variant == 1 or rng.random() < 0.3:
        out.append("Sure. Here is the annotation for the document.")
        out.append("")
    out.append("<R>")
    out.append(f"The document {doc_id} describes how the app handles "
               f"{join_list([x.lower() for x in gold['data_types']])}.")
    out.append("I listed each behavior once and wrote one story per behavior group.")
    out.append("</R>")
    for tag, items in (("ACTIONS", actions), ("DATA_TYPES", data), ("PURPOSES", purposes)):
        out.append(f"<{tag}>")
        out += [bullet + case(x) for x in items]
        out.append(f"</{tag}>")
    out.append("<STORIES>")
    out += lines
    out.append("</STORIES>")
    return "\n".join(out) + "\n"


def distribute_matched(rng, caps, total):
    matched = list(caps)
    while sum(matched) > total:
        i = rng.randrange(len(matched))
        if matched[i] > 1:
            matched[i] -= 1
    return matched


def main():
    out = Path(sys.argv[1] if len(sys.argv) > 1 else "fixtures/corpus")
    rng = random.Random(SEED)
    docs_dir = out / "documents"
    docs_dir.mkdir(parents=True, exist_ok=True)

    n_docs = sum(c for _, c, _ in LAYOUT)
    data_counts = [3] * 10 + [2] * (n_docs - 10)
    purpose_counts = [3] * 11 + [2] * (n_docs - 11)
    story_counts = [4] * 18 + [3] * (n_docs - 18)
    for xs in (data_counts, purpose_counts, story_counts):
        rng.shuffle(xs)

    documents, gold, entries = [], {}, []
    i = 0
    for file_type, count, filenames in LAYOUT:
        for j in range(count):
            app = APPS[(i * 3 + j) % len(APPS)]
            filename = filenames[j]
            doc_id = f"{app[0].lower()}/{filename}"
            g = None
            while g is None:
                g = make_gold(rng, data_counts[i], purpose_counts[i], story_counts[i])
            kind = {"software_code_spec": "service", "user_developer_guide": "app",
                    "architecture_db_design": "backend", "readme": "project"}[file_type]
            text = document_text(rng, app, kind, file_type, filename, g)
            path = docs_dir / doc_id
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(text, encoding="utf-8")
            documents.append({"id": doc_id, "path": f"documents/{doc_id}", "file_type": file_type,
                              "app_name": app[0]})
            gold[doc_id] = g
            entries.append((doc_id, file_type))
            i += 1

    lines_for = {}
    for file_type, counts in RESPONSE0_LINES.items():
        ids = [d for d, t in entries if t == file_type]
        assert len(ids) == len(counts)
        for d, n in zip(ids, counts):
            lines_for[d] = n
    ids = [d for d, _ in entries]
    caps = [min(len(gold[d]["stories"]), lines_for[d]) for d in ids]
    matched = distribute_matched(rng, caps, MATCHED_TOTAL)

    responses = {}
    for d, m in zip(ids, matched):
        r0 = response_text(rng, d, gold[d], lines_for[d], m, 0)
        r1 = response_text(rng, d, gold[d], max(2, lines_for[d] - 1), max(1, m - 1), 1)
        assert r0 != r1
        responses[d] = {"0": r0, "1": r1}

    documents.sort(key=lambda x: x["id"])
    manifest = {"taxonomy_version": "pact-ext-1.0", "documents": documents,
                "gold": {d: gold[d] for d in sorted(gold)}}
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")
    hints = {"file_types": {
        "*README*": "readme",
        "*.sql": "architecture_db_design",
        "*architecture*": "architecture_db_design",
        "*design*": "architecture_db_design",
        "*data_model*": "architecture_db_design",
        "*guide*": "user_developer_guide",
        "*spec*": "software_code_spec",
        "*.java": "software_code_spec",
        "*.kt": "software_code_spec",
        "*.py": "software_code_spec",
        "*.ts": "software_code_spec",
        "*.swift": "software_code_spec",
        "*.go": "software_code_spec",
    }, "app_names": {f"{a[0].lower()}/*": a[0] for a in APPS}}
    (out / "hints.json").write_text(json.dumps(hints, indent=2) + "\n", encoding="utf-8")
    (out / "scripted_responses.json").write_text(json.dumps(responses, indent=2, sort_keys=True) + "\n",
                                                 encoding="utf-8")
    heldout = sorted(rng.sample(sorted(gold), 10))
    print(f"{len(documents)} documents, {sum(len(g['stories']) for g in gold.values())} gold stories, "
          f"{sum(lines_for.values())} response-0 story lines, {sum(matched)} matched; heldout {heldout}")


if __name__ == "__main__":
    main()
