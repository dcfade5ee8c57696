/** Collapsible analysis panels with pending/error states.
 *
 * Panels below the fold start closed and fill in lazily on first expand;
 * a failed panel shows its own error and never blanks the others.
 */

export class Panel {
  readonly element: HTMLDetailsElement;
  readonly body: HTMLDivElement;
  private status: HTMLSpanElement;
  private renderer: (() => void) | null = null;
  private rendered = false;

  constructor(title: string, open: boolean) {
    this.element = document.createElement('details');
    this.element.open = open;
    this.element.className = 'panel';
    const summary = document.createElement('summary');
    summary.textContent = title;
    this.status = document.createElement('span');
    this.status.className = 'panel-status';
    summary.append(this.status);
    this.body = document.createElement('div');
    this.body.className = 'panel-body';
    this.element.append(summary, this.body);
    this.element.addEventListener('toggle', () => {
      if (this.element.open && !this.rendered && this.renderer) {
        this.rendered = true;
        this.renderer();
      }
    });
  }

  setPending(pending: boolean): void {
    this.status.textContent = pending ? ' …' : '';
    this.element.classList.toggle('pending', pending);
  }

  setError(message: string): void {
    this.body.textContent = '';
    const err = document.createElement('p');
    err.className = 'panel-error';
    err.textContent = message;
    this.body.append(err);
    this.rendered = true;
  }

  /** Provide fresh content; renders now if open, else on first expand. */
  setContent(render: () => void): void {
    this.body.textContent = '';
    this.rendered = false;
    this.renderer = render;
    if (this.element.open) {
      this.rendered = true;
      render();
    }
  }
}
