// Session state.  Everything except the review cursor is a verbatim copy
// of the latest API responses, so rebuilding the session from fresh
// fetches reproduces the identical view.

import type {
  AdjustmentReport,
  BeliefsOut,
  FeedbackOut,
  QueueDoc,
  VerdictOut,
} from "./api.js";

export interface WhatIf {
  keywords: string[];
  verdict: VerdictOut;
}

export interface Session {
  profile: string;
  beliefs: BeliefsOut | null;
  previous: BeliefsOut | null; // snapshot the last reports apply to
  queue: QueueDoc[];
  cursor: number;
  lastReports: AdjustmentReport[];
  whatif: WhatIf | null;
  flash: string | null;
  error: string | null;
  busy: boolean;
}

export function initialSession(profile: string): Session {
  return {
    profile,
    beliefs: null,
    previous: null,
    queue: [],
    cursor: 0,
    lastReports: [],
    whatif: null,
    flash: null,
    error: null,
    busy: false,
  };
}

function clampCursor(cursor: number, queue: QueueDoc[]): number {
  if (queue.length === 0) return 0;
  return Math.min(Math.max(cursor, 0), queue.length - 1);
}

/** A poll (or hard refresh) result: replace, never merge. */
export function withSnapshot(
  session: Session,
  beliefs: BeliefsOut,
  queue: QueueDoc[],
): Session {
  return {
    ...session,
    beliefs,
    queue,
    cursor: clampCursor(session.cursor, queue),
    error: null,
  };
}

/** A judgment round-trip: the server diff drives the panel. */
export function withFeedback(
  session: Session,
  out: FeedbackOut,
  beliefs: BeliefsOut,
  queue: QueueDoc[],
): Session {
  const changed = out.reports.some((report) => report.changes.length > 0);
  return {
    ...session,
    previous: session.beliefs,
    beliefs,
    queue,
    cursor: clampCursor(session.cursor, queue),
    lastReports: out.reports,
    flash: changed ? null : "no belief changes",
    error: null,
    busy: false,
  };
}

/** Skip is purely local: move on to the next queued document. */
export function skipCurrent(session: Session): Session {
  if (session.queue.length === 0) return session;
  return {
    ...session,
    cursor: (session.cursor + 1) % session.queue.length,
  };
}

export function withWhatIf(
  session: Session,
  keywords: string[],
  verdict: VerdictOut,
): Session {
  return { ...session, whatif: { keywords, verdict }, busy: false };
}

export function withError(session: Session, message: string): Session {
  return { ...session, error: message, busy: false };
}

export function currentDocument(session: Session): QueueDoc | null {
  return session.queue[session.cursor] ?? null;
}
