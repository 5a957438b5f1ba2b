package android.widget;

public class CheckedTextView extends TextView implements Checkable {
    /**
     * Set the checkmark to a given Drawable, identified by its resource id.
     * @param resid The Drawable to use for the checkmark.
     */
    public void setCheckMarkDrawable(@DrawableRes int resId) {
        if (resId != 0 && resId == mCheckMarkResource) {
            return;
        }
        mCheckMarkResource = resId;
    }

    /**
     * Set the checkmark to a given Drawable. This will be drawn when {@link #isChecked()} is true.
     * @param d The Drawable to use for the checkmark.
     * @see #setCheckMarkDrawable(int)
     * @see #getCheckMarkDrawable()
     * @attr ref android.R.styleable#CheckedTextView_checkMark
     */
    public void setCheckMarkDrawable(@Nullable Drawable d) {
        if (mCheckMarkDrawable != null) {
            mCheckMarkDrawable.setCallback(null);
            unscheduleDrawable(mCheckMarkDrawable);
        }
        mNeedRequestlayout = (d != mCheckMarkDrawable);
        mCheckMarkDrawable = d;
        refreshDrawableState();
    }
}
