// Pure HTML renderers.  Every function maps state to a string — no DOM
// reads, no formatting of ranks (the server's 3-decimal strings are
// shown verbatim), so the same state always yields the same markup.

import type { BeliefsOut, QueueDoc, VerdictOut } from "./api.js";
import type { BeliefRow } from "./diff.js";
import type { Session } from "./state.js";

export function esc(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function transitionBadge(row: BeliefRow): string {
  if (!row.transition) return "";
  const { before, after } = row.transition;
  return `<span class="transition">${esc(before)} &rarr; ${esc(after)}</span>`;
}

export function renderBeliefPanel(
  snapshot: BeliefsOut,
  rows: BeliefRow[],
): string {
  const body = rows
    .map((row) => {
      const classes = ["belief", row.status];
      if (!row.inCut && row.status !== "removed") classes.push("out-of-cut");
      const flags = row.protected ? `<span class="badge protected">P</span>` : "";
      return `<tr class="${classes.join(" ")}">
  <td class="rank">${esc(row.rank)}</td>
  <td class="flags">${flags}</td>
  <td class="formula">${esc(row.formula)}${transitionBadge(row)}</td>
</tr>`;
    })
    .join("\n");
  return `<section class="panel beliefs">
<h2>Belief base</h2>
<table>
<thead><tr><th>rank</th><th></th><th>formula</th></tr></thead>
<tbody>
${body}
</tbody>
</table>
<footer class="meta">
  <span>Incons <b>${esc(snapshot.incons)}</b></span>
  <span>&Delta; <b>${snapshot.cut_size}</b></span>
  <span>mode <b>${esc(snapshot.mode)}</b></span>
</footer>
</section>`;
}

export function renderQueue(
  queue: QueueDoc[],
  cursor: number,
  busy: boolean,
): string {
  if (queue.length === 0) {
    return `<section class="panel queue">
<h2>Review queue</h2>
<p class="empty">Nothing waiting for review.</p>
</section>`;
  }
  const disabled = busy ? " disabled" : "";
  const items = queue
    .map((doc, index) => {
      const focused = index === cursor;
      const actions = focused
        ? `<div class="actions">
  <button data-action="judge" data-doc="${esc(doc.id)}" data-judgment="R"${disabled}>Relevant</button>
  <button data-action="judge" data-doc="${esc(doc.id)}" data-judgment="N"${disabled}>Not relevant</button>
  <button data-action="skip"${disabled}>Skip</button>
</div>`
        : "";
      return `<li class="doc${focused ? " focused" : ""}">
  <span class="doc-id">${esc(doc.id)}</span>
  <span class="keywords">${doc.keywords.map(esc).join(", ")}</span>
  ${actions}
</li>`;
    })
    .join("\n");
  return `<section class="panel queue">
<h2>Review queue</h2>
<ol>
${items}
</ol>
</section>`;
}

export function renderWhatIf(
  state: { keywords: string[]; verdict: VerdictOut } | null,
  busy: boolean,
): string {
  const value = state ? esc(state.keywords.join(", ")) : "";
  // empty input keeps the submit disabled; main.ts re-enables on typing
  const submitDisabled = busy || value === "" ? " disabled" : "";
  let result = "";
  if (state) {
    const v = state.verdict;
    const premises = v.premises.length
      ? `<ul class="premises">${v.premises
          .map((p) => `<li>${esc(p)}</li>`)
          .join("")}</ul>`
      : "";
    result = `<div class="verdict ${v.relevant ? "accepted" : "rejected"}">
  <b>${v.relevant ? "relevant" : "not relevant"}</b>
  <span>degree ${esc(v.degree)}</span>
  <span>Incons ${esc(v.incons)}</span>
  <span>&Delta; ${v.cut_size}</span>
  ${premises}
</div>`;
  }
  return `<section class="panel whatif">
<h2>What if&hellip;</h2>
<form data-action="whatif">
  <input name="keywords" placeholder="keywords, comma separated" value="${value}" autocomplete="off">
  <button type="submit"${submitDisabled}>Filter</button>
</form>
${result}
</section>`;
}

export function renderBanner(error: string | null): string {
  if (!error) return "";
  return `<div class="banner error">
  <span>${esc(error)}</span>
  <button data-action="retry">Retry</button>
</div>`;
}

export function renderToast(flash: string | null): string {
  return flash ? `<div class="toast">${esc(flash)}</div>` : "";
}

export function renderApp(session: Session, rows: BeliefRow[]): string {
  if (!session.beliefs) {
    return `${renderBanner(session.error)}<p class="loading">Connecting&hellip;</p>`;
  }
  return `${renderBanner(session.error)}
${renderToast(session.flash)}
<header class="top">
  <h1>entrench <span>console</span></h1>
  <span class="profile">profile: ${esc(session.profile)}</span>
</header>
<div class="columns">
${renderBeliefPanel(session.beliefs, rows)}
<div class="side">
${renderQueue(session.queue, session.cursor, session.busy)}
${renderWhatIf(session.whatif, session.busy)}
</div>
</div>`;
}
