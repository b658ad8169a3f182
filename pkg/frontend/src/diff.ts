// Turning the server's adjustment reports into row decorations for the
// belief panel.  The panel itself always shows the *next* snapshot; the
// reports only decide which rows light up (raised/new) and which beliefs
// get a struck farewell row.  All rank strings come from server
// responses — nothing here ever formats a number.

import type { AdjustmentReport, BeliefView } from "./api.js";

export type RowStatus = "same" | "raised" | "lowered" | "new" | "removed";

export interface BeliefRow {
  formula: string;
  rank: string;
  protected: boolean;
  inCut: boolean;
  transition: { before: string; after: string } | null;
  status: RowStatus;
}

interface NetChange {
  before: number;
  after: number;
}

/** Fold a feedback response's reports into one net change per formula. */
export function netChanges(
  reports: AdjustmentReport[],
): Map<string, NetChange> {
  const net = new Map<string, NetChange>();
  for (const report of reports) {
    for (const change of report.changes) {
      const entry = net.get(change.sentence);
      if (entry) {
        entry.after = change.after;
      } else {
        net.set(change.sentence, {
          before: change.before,
          after: change.after,
        });
      }
    }
  }
  // a raise later undone in the same batch is not a change at all
  for (const [sentence, entry] of net) {
    if (Math.abs(entry.after - entry.before) < 1e-9) net.delete(sentence);
  }
  return net;
}

function statusOf(change: NetChange | undefined): RowStatus {
  if (!change) return "same";
  if (change.after > change.before) {
    return change.before <= 1e-9 ? "new" : "raised";
  }
  return "lowered";
}

/**
 * Decorate the next snapshot's rows with what just happened.
 *
 * `prev` supplies the server-formatted rank strings for beliefs that the
 * reports removed entirely; those come back as struck rows appended after
 * the live table (which keeps the server's rank-descending order intact).
 */
export function decorate(
  prev: BeliefView[],
  next: BeliefView[],
  reports: AdjustmentReport[],
): BeliefRow[] {
  const net = netChanges(reports);
  const live = new Set(next.map((view) => view.formula));

  const rows: BeliefRow[] = next.map((view) => ({
    formula: view.formula,
    rank: view.rank,
    protected: view.protected,
    inCut: view.in_cut,
    transition: view.last_change,
    status: statusOf(net.get(view.formula)),
  }));

  for (const view of prev) {
    const change = net.get(view.formula);
    if (change && change.after <= 1e-9 && !live.has(view.formula)) {
      rows.push({
        formula: view.formula,
        rank: view.rank,
        protected: view.protected,
        inCut: false,
        transition: null,
        status: "removed",
      });
    }
  }
  return rows;
}

/** Server contract: rank descending, then formula text ascending. */
export function isSortedView(beliefs: BeliefView[]): boolean {
  for (let i = 1; i < beliefs.length; i++) {
    const a = beliefs[i - 1]!;
    const b = beliefs[i]!;
    const byRank = Number(b.rank) - Number(a.rank);
    if (byRank > 0) return false;
    if (byRank === 0 && a.formula > b.formula) return false;
  }
  return true;
}
