// Bootstrap and event wiring.  All rendering goes through renderApp on a
// plain state object; every mutation waits for the server's response
// (and its adjustment reports) before anything on screen moves.

import { ApiClient, ApiError } from "./api.js";
import { decorate, type BeliefRow } from "./diff.js";
import {
  currentDocument,
  initialSession,
  skipCurrent,
  withError,
  withFeedback,
  withSnapshot,
  withWhatIf,
  type Session,
} from "./state.js";
import { renderApp } from "./views.js";

const params = new URLSearchParams(window.location.search);
const api = new ApiClient(
  params.get("api") ?? window.location.origin,
  params.get("token") ?? undefined,
);

let session: Session = initialSession(params.get("profile") ?? "");
let rows: BeliefRow[] = [];
let pollTimer: number | undefined;

const root = document.getElementById("app")!;

function render(): void {
  root.innerHTML = renderApp(session, rows);
}

function update(next: Session, nextRows?: BeliefRow[]): void {
  session = next;
  if (nextRows) rows = nextRows;
  render();
}

function describe(err: unknown): string {
  if (err instanceof ApiError) {
    return err.status === 0 ? `API unreachable: ${err.detail}` : err.message;
  }
  return String(err);
}

async function refresh(): Promise<void> {
  try {
    const [beliefs, queue] = await Promise.all([
      api.beliefs(session.profile),
      api.queue(session.profile),
    ]);
    update(
      withSnapshot(session, beliefs, queue.documents),
      decorate(beliefs.beliefs, beliefs.beliefs, []),
    );
  } catch (err) {
    update(withError(session, describe(err)));
  }
}

async function judge(docId: string, judgment: "R" | "N"): Promise<void> {
  const before = session.beliefs;
  update({ ...session, busy: true });
  try {
    const out = await api.feedback(session.profile, docId, judgment);
    const [beliefs, queue] = await Promise.all([
      api.beliefs(session.profile),
      api.queue(session.profile),
    ]);
    update(
      withFeedback(session, out, beliefs, queue.documents),
      decorate(before?.beliefs ?? [], beliefs.beliefs, out.reports),
    );
  } catch (err) {
    if (err instanceof ApiError && err.status === 409) {
      // someone else mutated the profile: drop our intent, resync
      session = { ...session, busy: false };
      await refresh();
      return;
    }
    update(withError(session, describe(err)));
  }
}

async function whatIf(raw: string): Promise<void> {
  const keywords = raw
    .split(/[\s,]+/)
    .map((k) => k.trim())
    .filter(Boolean);
  if (keywords.length === 0) return;
  update({ ...session, busy: true });
  try {
    const verdict = await api.filter(session.profile, keywords);
    update(withWhatIf(session, keywords, verdict));
  } catch (err) {
    update(withError(session, describe(err)));
  }
}

root.addEventListener("click", (event) => {
  const target = (event.target as HTMLElement).closest("[data-action]");
  if (!(target instanceof HTMLElement)) return;
  const action = target.dataset.action;
  if (action === "judge" && target.dataset.doc && target.dataset.judgment) {
    void judge(target.dataset.doc, target.dataset.judgment as "R" | "N");
  } else if (action === "skip") {
    update(skipCurrent(session));
  } else if (action === "retry") {
    void bootstrap();
  }
});

root.addEventListener("submit", (event) => {
  const form = event.target as HTMLFormElement;
  if (form.dataset.action !== "whatif") return;
  event.preventDefault();
  const input = form.elements.namedItem("keywords") as HTMLInputElement;
  void whatIf(input.value);
});

root.addEventListener("input", (event) => {
  const input = event.target as HTMLInputElement;
  const form = input.closest("form[data-action=whatif]");
  if (!form) return;
  const submit = form.querySelector("button[type=submit]");
  if (submit instanceof HTMLButtonElement) {
    submit.disabled = session.busy || input.value.trim() === "";
  }
});

async function bootstrap(): Promise<void> {
  render();
  try {
    const config = await api.config();
    const profile = session.profile || config.profiles[0];
    if (!profile) {
      update(withError(session, "no profiles on this server"));
      return;
    }
    session = { ...initialSession(profile) };
    await refresh();
    if (pollTimer !== undefined) window.clearInterval(pollTimer);
    pollTimer = window.setInterval(() => {
      if (!session.busy) void refresh();
    }, config.poll_ms);
  } catch (err) {
    update(withError(session, describe(err)));
  }
}

void bootstrap();
