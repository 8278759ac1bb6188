/** Trailing-edge debounce with cancel and pending-query handles. */
export function debounce<A extends unknown[]>(
  fn: (...args: A) => void,
  delayMs: number,
): { call: (...args: A) => void; cancel: () => void; pending: () => boolean } {
  let timer: ReturnType<typeof setTimeout> | null = null;

  const cancel = () => {
    if (timer !== null) {
      clearTimeout(timer);
      timer = null;
    }
  };

  const call = (...args: A) => {
    cancel();
    timer = setTimeout(() => {
      timer = null;
      fn(...args);
    }, Math.max(0, delayMs));
  };

  return { call, cancel, pending: () => timer !== null };
}
